#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dspace::geometry {

/// Dense row-major storage for points of a fixed dimension.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim) : dim_(dim) {}
  PointCloud(std::size_t dim, std::vector<double> coords);

  /// Builds a cloud from nested rows; throws DimensionMismatch on ragged input.
  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return size() == 0; }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) {
    return {coords_.data() + i * dim_, dim_};
  }

  void push_back(std::span<const double> p);
  void push_back(std::initializer_list<double> p) {
    push_back(std::span<const double>(p.begin(), p.size()));
  }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void append(const PointCloud& other);

  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Affine map between physical bounds and the unit box.
struct Normalization {
  std::vector<double> lower;
  std::vector<double> upper;

  static Normalization unit(std::size_t dim);
  std::size_t dim() const { return lower.size(); }
  double width(std::size_t i) const { return upper[i] - lower[i]; }
  /// Product of the bound widths; converts normalized measures to physical units.
  double volume_scale() const;

  std::vector<double> to_unit(std::span<const double> x) const;
  std::vector<double> from_unit(std::span<const double> u) const;
  PointCloud to_unit(const PointCloud& cloud) const;
  PointCloud from_unit(const PointCloud& cloud) const;
};

}  // namespace dspace::geometry
