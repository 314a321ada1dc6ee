#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dspace/chromapcc/pcc.hpp"
#include "dspace/dsid/problem.hpp"
#include "dspace/geometry/point_cloud.hpp"

namespace dspace::dsid {

/// Maps a decision vector in physical units to KPI values. Implementations
/// are pure and safe to call from several threads at once.
class ProcessModel {
 public:
  virtual ~ProcessModel() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> kpi_names() const = 0;
  virtual std::vector<double> evaluate(std::span<const double> x) const = 0;
  /// Identifies model and options in run caches; equal tags mean equal outputs.
  virtual std::string tag() const = 0;
};

/// Closed-form test problem on the bounds-normalized cube. KPI "quality" is
/// 100 - 50 |z - center|^2 and is feasible inside the ball of `radius` when
/// constrained by quality_threshold(); "throughput" is 1 + z1 + 0.5 z2 z3
/// (1 + z1 + 0.5 z2 in 2D) and smooth everywhere.
class BenchmarkModel : public ProcessModel {
 public:
  BenchmarkModel(sampling::Bounds bounds, std::vector<double> center, double radius);

  std::string name() const override { return "benchmark"; }
  std::vector<std::string> kpi_names() const override { return {"quality", "throughput"}; }
  std::vector<double> evaluate(std::span<const double> x) const override;
  std::string tag() const override;

  double radius() const { return radius_; }
  const std::vector<double>& center() const { return center_; }
  double quality_threshold() const { return 100.0 - 50.0 * radius_ * radius_; }
  /// True when the normalized point lies in the feasible ball.
  bool feasible_unit(std::span<const double> z) const;

  /// Standard test problem: ball of radius 0.35 at the cube centre.
  static DesignProblem standard_problem(std::size_t dim = 3, unsigned sp = 12);

 private:
  sampling::Bounds bounds_;
  std::vector<double> center_;
  double radius_;
};

/// Twin-column capture process; decisions are (c_feed, Q_feed, T_switch) in
/// that order, KPIs yield and productivity.
class ChromaPccModel : public ProcessModel {
 public:
  ChromaPccModel(chromapcc::ColumnParams params, chromapcc::CycleSchedule schedule = {},
                 chromapcc::SimOptions options = {});

  std::string name() const override { return "chromapcc"; }
  std::vector<std::string> kpi_names() const override { return {"yield", "productivity"}; }
  std::vector<double> evaluate(std::span<const double> x) const override;
  std::string tag() const override;

 private:
  chromapcc::ColumnParams params_;
  chromapcc::CycleSchedule schedule_;
  chromapcc::SimOptions options_;
};

/// Looks KPI rows up in a CSV table keyed by the exact decision values.
class TableModel : public ProcessModel {
 public:
  TableModel(const std::string& path, const std::vector<std::string>& decision_names);

  std::string name() const override { return "table"; }
  std::vector<std::string> kpi_names() const override { return kpis_; }
  std::vector<double> evaluate(std::span<const double> x) const override;
  std::string tag() const override { return tag_; }

 private:
  std::vector<std::string> kpis_;
  std::map<std::string, std::vector<double>> rows_;
  std::string tag_;
};

/// KPI rows for a batch; rows whose evaluation threw hold NaN.
struct BatchEvaluation {
  geometry::PointCloud kpis;
  std::vector<std::size_t> failed_rows;
  std::vector<std::string> messages;  // one per failed row
};

/// Evaluates every row on `workers` threads (0 = hardware concurrency).
/// Output order follows input order regardless of scheduling.
BatchEvaluation evaluate_batch(const ProcessModel& model, const geometry::PointCloud& inputs, unsigned workers = 1);

/// Builds the model bound in the problem file. Throws ConfigError.
std::unique_ptr<ProcessModel> make_model(const DesignProblem& problem);

}  // namespace dspace::dsid
