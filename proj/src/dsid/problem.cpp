#include "dspace/dsid/problem.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "dspace/error.hpp"
#include "dspace/util/csv.hpp"

namespace dspace::dsid {

bool Constraint::satisfied(double value) const {
  if (std::isnan(value)) return false;
  return direction == Direction::at_least ? value >= threshold : value <= threshold;
}

double Constraint::violation_percent(double value) const {
  if (satisfied(value)) return 0.0;
  const double gap = std::abs(value - threshold);
  const double scale = std::abs(threshold) > 0.0 ? std::abs(threshold) : 1.0;
  return gap / scale * 100.0;
}

nlohmann::json Constraint::to_json() const {
  return {{"kpi", kpi},
          {"op", direction == Direction::at_least ? ">=" : "<="},
          {"threshold", threshold}};
}

Constraint Constraint::from_json(const nlohmann::json& j) {
  Constraint c;
  try {
    c.kpi = j.at("kpi").get<std::string>();
    const auto op = j.at("op").get<std::string>();
    if (op == ">=") {
      c.direction = Direction::at_least;
    } else if (op == "<=") {
      c.direction = Direction::at_most;
    } else {
      throw ConfigError("constraint op must be \">=\" or \"<=\", got \"" + op + "\"");
    }
    c.threshold = j.at("threshold").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("constraint: ") + e.what());
  }
  if (!std::isfinite(c.threshold)) throw ConfigError("constraint threshold must be finite");
  return c;
}

std::string DesignProblem::size_unit() const {
  // dimensionless decisions drop out of the product
  std::string s;
  for (const auto& u : units) {
    if (u.empty()) continue;
    if (!s.empty()) s += '*';
    s += u;
  }
  return s;
}

void DesignProblem::validate() const {
  bounds.validate();
  if (dim() != 2 && dim() != 3) throw ConfigError("design problems must have 2 or 3 decisions");
  if (units.size() != dim()) throw ConfigError("one unit string per decision is required");
  if (bounds.names.size() != dim()) throw ConfigError("every decision needs a name");
  if (sampling.sp < 1 || sampling.sp > 24) throw ConfigError("sampling.sp must be in [1, 24]");
  for (const auto& c : constraints) {
    if (c.kpi.empty()) throw ConfigError("constraint without a KPI name");
  }
}

void DesignProblem::check_kpis(const std::vector<std::string>& kpi_names) const {
  for (const auto& c : constraints) {
    if (std::find(kpi_names.begin(), kpi_names.end(), c.kpi) == kpi_names.end()) {
      throw MissingKpi("constraint references KPI '" + c.kpi + "' which the model does not produce");
    }
  }
}

nlohmann::json DesignProblem::to_json() const {
  nlohmann::json decisions = nlohmann::json::array();
  for (std::size_t i = 0; i < dim(); ++i) decisions.push_back({{"name", bounds.names[i]}, {"unit", units[i]}});
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : constraints) cons.push_back(c.to_json());
  return {{"decisions", decisions},
          {"bounds", bounds.to_json()},
          {"constraints", cons},
          {"model", {{"type", model.type}, {"options", model.options}}},
          {"sampling", {{"sp", sampling.sp}, {"skip_zero", sampling.skip_zero}}}};
}

DesignProblem DesignProblem::from_json(const nlohmann::json& j, std::string base_dir) {
  DesignProblem p;
  p.base_dir = std::move(base_dir);
  try {
    const auto& decisions = j.at("decisions");
    std::vector<std::string> names;
    for (const auto& d : decisions) {
      names.push_back(d.at("name").get<std::string>());
      p.units.push_back(d.value("unit", ""));
    }
    p.bounds = sampling::Bounds::from_json(j.at("bounds"));
    if (p.bounds.names != names) {
      throw ConfigError("bounds must list the decisions in the same order");
    }
    for (const auto& c : j.value("constraints", nlohmann::json::array())) {
      p.constraints.push_back(Constraint::from_json(c));
    }
    if (j.contains("model")) {
      p.model.type = j["model"].value("type", p.model.type);
      p.model.options = j["model"].value("options", nlohmann::json::object());
    }
    if (j.contains("sampling")) {
      p.sampling.sp = j["sampling"].value("sp", p.sampling.sp);
      p.sampling.skip_zero = j["sampling"].value("skip_zero", p.sampling.skip_zero);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("problem file: ") + e.what());
  }
  p.validate();
  return p;
}

DesignProblem DesignProblem::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  auto dir = std::filesystem::path(path).parent_path().string();
  return from_json(j, dir.empty() ? "." : dir);
}

}  // namespace dspace::dsid
