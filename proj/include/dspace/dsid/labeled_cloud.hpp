#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dspace/dsid/problem.hpp"
#include "dspace/geometry/point_cloud.hpp"

namespace dspace::dsid {

/// Evaluated samples split into satisfied and violated sets.
struct LabeledCloud {
  std::vector<std::string> decision_names;
  std::vector<std::string> kpi_names;
  geometry::PointCloud decisions;  // physical units
  geometry::PointCloud unit;       // normalized by the problem bounds
  geometry::PointCloud kpis;
  std::vector<bool> satisfied;
  std::vector<std::vector<int>> violated;  // constraint indices per row
  geometry::Normalization normalization;

  std::size_t size() const { return decisions.size(); }
  std::size_t n_sat() const;
  std::size_t n_vio() const { return size() - n_sat(); }
  std::vector<std::size_t> sat_rows() const;
  std::vector<std::size_t> vio_rows() const;
  /// Normalized coordinates of the satisfied / violated rows.
  geometry::PointCloud sat_points() const;
  geometry::PointCloud vio_points() const;
  int kpi_index(const std::string& name) const;  // -1 if absent
};

/// Labels each row: satisfied iff every constraint holds. Throws MissingKpi.
LabeledCloud classify(const geometry::PointCloud& decisions, const geometry::PointCloud& kpis,
                      const std::vector<std::string>& kpi_names, const DesignProblem& problem);

/// Columns: decisions, KPIs, `satisfied` (0/1).
void write_cloud_csv(std::ostream& out, const LabeledCloud& cloud);
void write_cloud_csv(const std::string& path, const LabeledCloud& cloud);
/// Reads a cloud CSV and relabels it against `problem` (the stored
/// `satisfied` column is ignored). Throws MissingKpi or ConfigError.
LabeledCloud read_cloud_csv(const std::string& path, const DesignProblem& problem);

/// Keeps the rows inside `new_bounds` and returns the problem restricted to
/// them. Throws InvalidBounds unless new_bounds lies within the old ones.
struct Refined {
  DesignProblem problem;
  LabeledCloud cloud;
};
Refined refine_bounds(const DesignProblem& problem, const LabeledCloud& cloud,
                      const sampling::Bounds& new_bounds);

}  // namespace dspace::dsid
