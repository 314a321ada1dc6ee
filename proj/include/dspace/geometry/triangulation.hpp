#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dspace/geometry/point_cloud.hpp"

namespace dspace::geometry {

/// Simplices with an absolute volume (area in 2D) below this are treated as
/// degenerate and never enter an alpha shape.
inline constexpr double kDegenerateVolume = 1e-12;

/// Delaunay triangulation of a 2D or 3D point cloud.
///
/// Simplices are stored flat with stride dim+1 and are positively oriented.
/// `neighbors` uses the same layout: entry k of simplex s is the simplex
/// across the facet opposite vertex k, or -1 on the convex hull.
struct Triangulation {
  PointCloud points;
  std::vector<int> simplices;
  std::vector<int> neighbors;
  std::vector<double> circumradii;
  std::vector<double> volumes;
  /// Input indices dropped because they repeat an earlier point exactly.
  std::vector<std::size_t> duplicates;

  std::size_t dim() const { return points.dim(); }
  std::size_t size() const { return circumradii.size(); }
  std::span<const int> simplex(std::size_t s) const {
    return {simplices.data() + s * (dim() + 1), dim() + 1};
  }
  std::span<const int> adjacent(std::size_t s) const {
    return {neighbors.data() + s * (dim() + 1), dim() + 1};
  }
  double max_circumradius() const;
};

/// Builds the Delaunay triangulation by incremental insertion with exact
/// predicates and symbolic perturbation for cospherical ties.
/// Throws DimensionMismatch for dim outside {2,3} and DegenerateInput when
/// fewer than dim+1 points are given or all points are coaffine.
Triangulation delaunay(const PointCloud& points);

/// Circumradius of a simplex given as dim+1 points; throws DegenerateSimplex
/// when its volume is below kDegenerateVolume.
double circumradius(const PointCloud& vertices);

/// Circumcenter of a simplex; same preconditions as circumradius().
std::vector<double> circumcenter(const PointCloud& vertices);

/// Signed volume (area in 2D) of a simplex; positive for positive orientation.
double signed_volume(std::size_t dim, std::span<const double* const> pts);

namespace detail {
/// Circumradius of a simplex given by vertex pointers, without degeneracy checks.
/// Returns +inf for a flat simplex.
double circumradius_raw(std::size_t dim, std::span<const double* const> pts);
bool circumcenter_raw(std::size_t dim, std::span<const double* const> pts, double* center);
}  // namespace detail

}  // namespace dspace::geometry
