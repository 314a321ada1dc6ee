#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dspace/sampling/sobol.hpp"

namespace dspace::dsid {

/// Performance constraint on one KPI: `kpi >= threshold` or `kpi <= threshold`.
struct Constraint {
  enum class Direction { at_least, at_most };

  std::string kpi;
  Direction direction = Direction::at_least;
  double threshold = 0.0;

  bool satisfied(double value) const;
  /// Shortfall relative to the threshold in percent, 0 when satisfied.
  double violation_percent(double value) const;

  nlohmann::json to_json() const;
  static Constraint from_json(const nlohmann::json& j);
};

/// Which process model evaluates the decision vectors, plus its options.
struct ModelBinding {
  std::string type = "benchmark";  // benchmark | chromapcc | table
  nlohmann::json options = nlohmann::json::object();
};

struct SamplingConfig {
  unsigned sp = 12;
  bool skip_zero = false;
};

struct DesignProblem {
  sampling::Bounds bounds;
  std::vector<std::string> units;  // one per decision
  std::vector<Constraint> constraints;
  ModelBinding model;
  SamplingConfig sampling;
  /// Relative paths in model options resolve against this directory.
  std::string base_dir = ".";

  std::size_t dim() const { return bounds.dim(); }
  const std::vector<std::string>& names() const { return bounds.names; }
  /// Unit of a normalized measure times the bound widths, e.g. "mg/ml*ml/min*min".
  std::string size_unit() const;

  /// Throws InvalidBounds or ConfigError.
  void validate() const;
  /// Throws MissingKpi when a constraint names a KPI not in `kpi_names`.
  void check_kpis(const std::vector<std::string>& kpi_names) const;

  nlohmann::json to_json() const;
  static DesignProblem from_json(const nlohmann::json& j, std::string base_dir = ".");
  static DesignProblem load(const std::string& path);
};

}  // namespace dspace::dsid
