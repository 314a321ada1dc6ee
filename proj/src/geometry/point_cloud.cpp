#include "dspace/geometry/point_cloud.hpp"

#include <string>

#include "dspace/error.hpp"

namespace dspace::geometry {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0) {
    throw DimensionMismatch("coordinate count " + std::to_string(coords_.size()) +
                            " is not a multiple of dimension " + std::to_string(dim_));
  }
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  PointCloud cloud(rows.front().size());
  cloud.reserve(rows.size());
  for (const auto& r : rows) cloud.push_back(r);
  return cloud;
}

void PointCloud::push_back(std::span<const double> p) {
  if (dim_ == 0) dim_ = p.size();
  if (p.size() != dim_) {
    throw DimensionMismatch("point of dimension " + std::to_string(p.size()) +
                            " added to cloud of dimension " + std::to_string(dim_));
  }
  coords_.insert(coords_.end(), p.begin(), p.end());
}

void PointCloud::append(const PointCloud& other) {
  if (other.empty()) return;
  if (dim_ == 0) dim_ = other.dim();
  if (other.dim() != dim_) throw DimensionMismatch("cannot append clouds of different dimension");
  coords_.insert(coords_.end(), other.coords_.begin(), other.coords_.end());
}

Normalization Normalization::unit(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

double Normalization::volume_scale() const {
  double s = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) s *= width(i);
  return s;
}

std::vector<double> Normalization::to_unit(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionMismatch("normalization dimension mismatch");
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - lower[i]) / width(i);
  return u;
}

std::vector<double> Normalization::from_unit(std::span<const double> u) const {
  if (u.size() != dim()) throw DimensionMismatch("normalization dimension mismatch");
  std::vector<double> x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = lower[i] + u[i] * width(i);
  return x;
}

PointCloud Normalization::to_unit(const PointCloud& cloud) const {
  PointCloud out(dim());
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out.push_back(to_unit(cloud[i]));
  return out;
}

PointCloud Normalization::from_unit(const PointCloud& cloud) const {
  PointCloud out(dim());
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out.push_back(from_unit(cloud[i]));
  return out;
}

}  // namespace dspace::geometry
