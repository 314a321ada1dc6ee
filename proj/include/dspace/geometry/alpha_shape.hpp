#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "dspace/geometry/point_cloud.hpp"
#include "dspace/geometry/triangulation.hpp"

namespace dspace::geometry {

/// Barycentric slack under which a query still counts as inside a simplex.
inline constexpr double kContainmentTolerance = 1e-9;

class Locator;

/// Subcomplex of a Delaunay triangulation made of the simplices whose
/// circumradius does not exceed the alpha radius.
///
/// Boundary facets are ordered so that prepending the opposite vertex gives a
/// positively oriented simplex: counterclockwise edges in 2D, outward-facing
/// triangles in 3D. Immutable after construction; const queries are
/// thread-safe.
class AlphaShape {
 public:
  AlphaShape() = default;

  std::size_t dim() const { return points_.dim(); }
  std::size_t size() const { return volumes_.size(); }
  bool empty() const { return volumes_.empty(); }

  const PointCloud& points() const { return points_; }
  std::span<const int> simplex(std::size_t s) const {
    return {simplices_.data() + s * (dim() + 1), dim() + 1};
  }
  const std::vector<int>& simplices() const { return simplices_; }
  /// Flat list with stride dim().
  const std::vector<int>& boundary_facets() const { return boundary_facets_; }
  std::size_t boundary_facet_count() const;
  /// Sorted unique point indices referenced by boundary facets.
  std::vector<int> boundary_vertices() const;
  /// Sorted unique point indices referenced by retained simplices.
  std::vector<int> vertices() const;

  /// +inf for a convex hull.
  double alpha_radius() const { return alpha_radius_; }
  const std::vector<double>& volumes() const { return volumes_; }
  const std::vector<double>& circumradii() const { return circumradii_; }
  /// Neighbour across the facet opposite each vertex, -1 if not retained.
  const std::vector<int>& neighbors() const { return neighbors_; }

  /// One label per retained simplex, numbered 0.. in order of first appearance.
  const std::vector<int>& region_labels() const { return region_labels_; }
  int n_regions() const { return n_regions_; }
  std::vector<double> region_measures() const;

  double measure() const;

  /// True when `query` lies in a retained simplex, boundary included.
  bool contains(std::span<const double> query) const;
  bool contains(std::initializer_list<double> query) const {
    return contains(std::span<const double>(query.begin(), query.size()));
  }
  /// Index of a retained simplex containing `query`, or -1.
  int locate(std::span<const double> query) const;

  const Normalization& normalization() const { return normalization_; }
  void set_normalization(Normalization n);

  nlohmann::json to_json() const;
  static AlphaShape from_json(const nlohmann::json& j);

 private:
  friend AlphaShape alpha_shape(const Triangulation& tri, double alpha_radius);
  void finish();

  PointCloud points_;
  std::vector<int> simplices_;
  std::vector<int> neighbors_;
  std::vector<double> volumes_;
  std::vector<double> circumradii_;
  std::vector<int> boundary_facets_;
  std::vector<int> region_labels_;
  int n_regions_ = 0;
  double alpha_radius_ = std::numeric_limits<double>::infinity();
  Normalization normalization_;
  std::shared_ptr<Locator> locator_;
};

/// Filters an existing triangulation. Throws EmptyShape when no simplex
/// survives and InvalidArgument for a non-positive radius.
AlphaShape alpha_shape(const Triangulation& tri, double alpha_radius);
AlphaShape alpha_shape(const PointCloud& points, double alpha_radius);
AlphaShape convex_hull(const PointCloud& points);

/// Number of connected components; throws EmptyShape for an empty shape.
int count_regions(const AlphaShape& shape);
inline double measure(const AlphaShape& shape) { return shape.measure(); }
inline bool contains(const AlphaShape& shape, std::span<const double> query) {
  return shape.contains(query);
}

/// Barycentric coordinates of `query` in a simplex of dim+1 vertices.
/// Returns false for a flat simplex.
bool barycentric(std::size_t dim, std::span<const double* const> vertices, const double* query,
                 double* lambda);

}  // namespace dspace::geometry
