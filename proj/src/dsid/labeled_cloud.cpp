#include "dspace/dsid/labeled_cloud.hpp"

#include <fstream>
#include <ostream>

#include "dspace/error.hpp"
#include "dspace/util/csv.hpp"

namespace dspace::dsid {

std::size_t LabeledCloud::n_sat() const {
  std::size_t n = 0;
  for (bool s : satisfied) n += s ? 1 : 0;
  return n;
}

std::vector<std::size_t> LabeledCloud::sat_rows() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (satisfied[i]) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> LabeledCloud::vio_rows() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!satisfied[i]) rows.push_back(i);
  }
  return rows;
}

geometry::PointCloud LabeledCloud::sat_points() const {
  geometry::PointCloud out(unit.dim());
  for (auto i : sat_rows()) out.push_back(unit[i]);
  return out;
}

geometry::PointCloud LabeledCloud::vio_points() const {
  geometry::PointCloud out(unit.dim());
  for (auto i : vio_rows()) out.push_back(unit[i]);
  return out;
}

int LabeledCloud::kpi_index(const std::string& name) const {
  for (std::size_t i = 0; i < kpi_names.size(); ++i) {
    if (kpi_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

LabeledCloud classify(const geometry::PointCloud& decisions, const geometry::PointCloud& kpis,
                      const std::vector<std::string>& kpi_names, const DesignProblem& problem) {
  problem.check_kpis(kpi_names);
  if (decisions.size() != kpis.size()) throw DimensionMismatch("classify: decision and KPI row counts differ");
  if (!decisions.empty() && decisions.dim() != problem.dim()) {
    throw DimensionMismatch("classify: decision columns do not match the problem");
  }
  if (!kpis.empty() && kpis.dim() != kpi_names.size()) throw DimensionMismatch("classify: KPI column count");

  LabeledCloud out;
  out.decision_names = problem.names();
  out.kpi_names = kpi_names;
  out.normalization = problem.bounds.normalization();
  out.decisions = decisions.empty() ? geometry::PointCloud(problem.dim()) : decisions;
  out.kpis = kpis.empty() ? geometry::PointCloud(kpi_names.size()) : kpis;
  out.unit = out.normalization.to_unit(out.decisions);
  if (out.unit.dim() == 0) out.unit = geometry::PointCloud(problem.dim());

  std::vector<int> cols;
  for (const auto& c : problem.constraints) {
    for (std::size_t k = 0; k < kpi_names.size(); ++k) {
      if (kpi_names[k] == c.kpi) {
        cols.push_back(static_cast<int>(k));
        break;
      }
    }
  }
  out.satisfied.resize(out.size());
  out.violated.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t c = 0; c < problem.constraints.size(); ++c) {
      if (!problem.constraints[c].satisfied(out.kpis[i][cols[c]])) out.violated[i].push_back(static_cast<int>(c));
    }
    out.satisfied[i] = out.violated[i].empty();
  }
  return out;
}

void write_cloud_csv(std::ostream& out, const LabeledCloud& cloud) {
  std::vector<std::string> header = cloud.decision_names;
  header.insert(header.end(), cloud.kpi_names.begin(), cloud.kpi_names.end());
  header.push_back("satisfied");
  util::write_csv_row(out, header);
  std::vector<std::string> fields;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    fields.clear();
    for (double v : cloud.decisions[i]) fields.push_back(util::format_double(v));
    for (double v : cloud.kpis[i]) fields.push_back(util::format_double(v));
    fields.push_back(cloud.satisfied[i] ? "1" : "0");
    util::write_csv_row(out, fields);
  }
}

void write_cloud_csv(const std::string& path, const LabeledCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_cloud_csv(out, cloud);
}

LabeledCloud read_cloud_csv(const std::string& path, const DesignProblem& problem) {
  const auto table = util::read_csv_file(path);
  std::vector<int> dcols;
  for (const auto& n : problem.names()) {
    const int c = table.column(n);
    if (c < 0) throw ConfigError(path + ": missing decision column '" + n + "'");
    dcols.push_back(c);
  }
  std::vector<std::string> kpi_names;
  std::vector<int> kcols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& h = table.header[c];
    bool is_decision = false;
    for (int d : dcols) is_decision = is_decision || d == static_cast<int>(c);
    if (is_decision || h == "satisfied") continue;
    kpi_names.push_back(h);
    kcols.push_back(static_cast<int>(c));
  }
  geometry::PointCloud decisions(problem.dim());
  geometry::PointCloud kpis(kpi_names.size());
  std::vector<double> x(problem.dim()), k(kpi_names.size());
  for (const auto& row : table.rows) {
    try {
      for (std::size_t j = 0; j < dcols.size(); ++j) x[j] = std::stod(row.at(dcols[j]));
      for (std::size_t j = 0; j < kcols.size(); ++j) k[j] = std::stod(row.at(kcols[j]));
    } catch (const std::exception&) {
      throw ConfigError(path + ": non-numeric entry");
    }
    decisions.push_back(x);
    kpis.push_back(k);
  }
  return classify(decisions, kpis, kpi_names, problem);
}

Refined refine_bounds(const DesignProblem& problem, const LabeledCloud& cloud, const sampling::Bounds& new_bounds) {
  new_bounds.validate();
  if (new_bounds.dim() != problem.dim()) throw InvalidBounds("refined bounds have the wrong dimension");
  for (std::size_t i = 0; i < problem.dim(); ++i) {
    if (new_bounds.lower[i] < problem.bounds.lower[i] || new_bounds.upper[i] > problem.bounds.upper[i]) {
      throw InvalidBounds("refined bounds for '" + problem.names()[i] + "' leave the original bounds");
    }
  }
  Refined out;
  out.problem = problem;
  out.problem.bounds.lower = new_bounds.lower;
  out.problem.bounds.upper = new_bounds.upper;

  geometry::PointCloud decisions(problem.dim());
  geometry::PointCloud kpis(cloud.kpi_names.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!new_bounds.contains(cloud.decisions[i])) continue;
    decisions.push_back(cloud.decisions[i]);
    kpis.push_back(cloud.kpis[i]);
  }
  out.cloud = classify(decisions, kpis, cloud.kpi_names, out.problem);
  return out;
}

}  // namespace dspace::dsid
