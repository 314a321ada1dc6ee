#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dspace/geometry/alpha_shape.hpp"
#include "dspace/geometry/point_cloud.hpp"
#include "dspace/surrogate/mlp.hpp"

namespace dspace::surrogate {

/// Maps decision vectors (physical units, one per row) to KPI rows.
class Interpolator {
 public:
  virtual ~Interpolator() = default;
  virtual geometry::PointCloud predict(const geometry::PointCloud& inputs) const = 0;
  virtual std::string kind() const = 0;
  /// Held-out mean percentage error per KPI, empty when unknown.
  std::vector<double> test_mpe;
};

class MlpInterpolator : public Interpolator {
 public:
  explicit MlpInterpolator(MlpModel model, std::vector<double> mpe = {});
  geometry::PointCloud predict(const geometry::PointCloud& inputs) const override;
  std::string kind() const override { return "mlp"; }
  const MlpModel& model() const { return model_; }

 private:
  MlpModel model_;
};

/// Piecewise-linear interpolation on the Delaunay triangulation of the
/// training inputs (normalized to their bounding box). Queries outside the
/// hull take the value of the nearest training point.
class LinearInterpolator : public Interpolator {
 public:
  LinearInterpolator(const geometry::PointCloud& inputs, const geometry::PointCloud& outputs);
  geometry::PointCloud predict(const geometry::PointCloud& inputs) const override;
  std::string kind() const override { return "linear"; }

 private:
  geometry::Normalization norm_;
  geometry::PointCloud unit_inputs_;
  geometry::PointCloud outputs_;
  geometry::AlphaShape hull_;
};

/// Wraps a closed-form model; exact up to the function itself.
class FunctionInterpolator : public Interpolator {
 public:
  using Fn = std::function<std::vector<double>(std::span<const double>)>;
  FunctionInterpolator(Fn fn, std::size_t n_outputs);
  geometry::PointCloud predict(const geometry::PointCloud& inputs) const override;
  std::string kind() const override { return "exact"; }

 private:
  Fn fn_;
  std::size_t n_outputs_;
};

}  // namespace dspace::surrogate
