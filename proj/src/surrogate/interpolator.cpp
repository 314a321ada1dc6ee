#include "dspace/surrogate/interpolator.hpp"

#include <limits>

#include "dspace/error.hpp"

namespace dspace::surrogate {

MlpInterpolator::MlpInterpolator(MlpModel model, std::vector<double> mpe) : model_(std::move(model)) {
  test_mpe = std::move(mpe);
}

geometry::PointCloud MlpInterpolator::predict(const geometry::PointCloud& inputs) const {
  return model_.predict(inputs);
}

LinearInterpolator::LinearInterpolator(const geometry::PointCloud& inputs,
                                       const geometry::PointCloud& outputs)
    : outputs_(outputs) {
  if (inputs.size() != outputs.size()) throw DimensionMismatch("inputs and outputs differ in rows");
  if (inputs.empty()) throw EmptyInput("linear interpolation needs data");
  const auto box = MinMax::fit(inputs);
  norm_ = {box.lower, box.upper};
  unit_inputs_ = norm_.to_unit(inputs);
  hull_ = geometry::convex_hull(unit_inputs_);
}

geometry::PointCloud LinearInterpolator::predict(const geometry::PointCloud& inputs) const {
  const std::size_t d = unit_inputs_.dim();
  const std::size_t k = outputs_.dim();
  geometry::PointCloud out(k);
  out.reserve(inputs.size());
  std::vector<double> row(k), lambda(d + 1);
  std::vector<const double*> verts(d + 1);
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    const auto q = norm_.to_unit(inputs[r]);
    const int s = hull_.locate(q);
    std::fill(row.begin(), row.end(), 0.0);
    if (s >= 0) {
      const auto simplex = hull_.simplex(static_cast<std::size_t>(s));
      for (std::size_t v = 0; v <= d; ++v) verts[v] = hull_.points()[simplex[v]].data();
      geometry::barycentric(d, verts, q.data(), lambda.data());
      for (std::size_t v = 0; v <= d; ++v) {
        const auto y = outputs_[simplex[v]];
        for (std::size_t i = 0; i < k; ++i) row[i] += lambda[v] * y[i];
      }
    } else {
      std::size_t best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < unit_inputs_.size(); ++p) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double t = unit_inputs_[p][i] - q[i];
          d2 += t * t;
        }
        if (d2 < best_d2) {
          best_d2 = d2;
          best = p;
        }
      }
      for (std::size_t i = 0; i < k; ++i) row[i] = outputs_[best][i];
    }
    out.push_back(row);
  }
  return out;
}

FunctionInterpolator::FunctionInterpolator(Fn fn, std::size_t n_outputs)
    : fn_(std::move(fn)), n_outputs_(n_outputs) {}

geometry::PointCloud FunctionInterpolator::predict(const geometry::PointCloud& inputs) const {
  geometry::PointCloud out(n_outputs_);
  out.reserve(inputs.size());
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    const auto y = fn_(inputs[r]);
    if (y.size() != n_outputs_) throw DimensionMismatch("model returned the wrong number of KPIs");
    out.push_back(y);
  }
  return out;
}

}  // namespace dspace::surrogate
