#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "dspace/error.hpp"
#include "dspace/geometry/triangulation.hpp"

namespace dspace::geometry {

namespace {

std::vector<const double*> pointers(const PointCloud& vertices) {
  if (vertices.dim() != 2 && vertices.dim() != 3) {
    throw DimensionMismatch("simplex must be 2D or 3D, got dimension " +
                            std::to_string(vertices.dim()));
  }
  if (vertices.size() != vertices.dim() + 1) {
    throw DimensionMismatch("simplex needs " + std::to_string(vertices.dim() + 1) +
                            " vertices, got " + std::to_string(vertices.size()));
  }
  std::vector<const double*> p;
  for (std::size_t i = 0; i < vertices.size(); ++i) p.push_back(vertices[i].data());
  return p;
}

void check_volume(std::size_t dim, std::span<const double* const> p) {
  const double v = std::abs(signed_volume(dim, p));
  if (v < kDegenerateVolume) {
    throw DegenerateSimplex("simplex volume " + std::to_string(v) + " is below " +
                            std::to_string(kDegenerateVolume));
  }
}

}  // namespace

double signed_volume(std::size_t dim, std::span<const double* const> pts) {
  if (dim == 2) {
    const double ux = pts[1][0] - pts[0][0], uy = pts[1][1] - pts[0][1];
    const double vx = pts[2][0] - pts[0][0], vy = pts[2][1] - pts[0][1];
    return 0.5 * (ux * vy - uy * vx);
  }
  if (dim == 3) {
    double u[3], v[3], w[3];
    for (int k = 0; k < 3; ++k) {
      u[k] = pts[1][k] - pts[0][k];
      v[k] = pts[2][k] - pts[0][k];
      w[k] = pts[3][k] - pts[0][k];
    }
    const double det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
                       u[2] * (v[0] * w[1] - v[1] * w[0]);
    return det / 6.0;
  }
  throw DimensionMismatch("signed volume supports only 2D and 3D");
}

namespace detail {

// Solves 2 (q_i - q_0) . x = |q_i - q_0|^2 for the offset x of the centre.
bool circumcenter_raw(std::size_t dim, std::span<const double* const> pts, double* center) {
  if (dim == 2) {
    const double ax = pts[1][0] - pts[0][0], ay = pts[1][1] - pts[0][1];
    const double bx = pts[2][0] - pts[0][0], by = pts[2][1] - pts[0][1];
    const double d = 2.0 * (ax * by - ay * bx);
    if (d == 0.0) return false;
    const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by;
    center[0] = pts[0][0] + (by * a2 - ay * b2) / d;
    center[1] = pts[0][1] + (ax * b2 - bx * a2) / d;
    return std::isfinite(center[0]) && std::isfinite(center[1]);
  }
  double a[3], b[3], c[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = pts[1][k] - pts[0][k];
    b[k] = pts[2][k] - pts[0][k];
    c[k] = pts[3][k] - pts[0][k];
  }
  const double a2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
  const double b2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
  const double c2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
  const double bxc[3] = {b[1] * c[2] - b[2] * c[1], b[2] * c[0] - b[0] * c[2],
                         b[0] * c[1] - b[1] * c[0]};
  const double cxa[3] = {c[1] * a[2] - c[2] * a[1], c[2] * a[0] - c[0] * a[2],
                         c[0] * a[1] - c[1] * a[0]};
  const double axb[3] = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                         a[0] * b[1] - a[1] * b[0]};
  const double d = 2.0 * (a[0] * bxc[0] + a[1] * bxc[1] + a[2] * bxc[2]);
  if (d == 0.0) return false;
  bool ok = true;
  for (int k = 0; k < 3; ++k) {
    center[k] = pts[0][k] + (a2 * bxc[k] + b2 * cxa[k] + c2 * axb[k]) / d;
    ok = ok && std::isfinite(center[k]);
  }
  return ok;
}

double circumradius_raw(std::size_t dim, std::span<const double* const> pts) {
  std::array<double, 3> c{};
  if (!circumcenter_raw(dim, pts, c.data())) return std::numeric_limits<double>::infinity();
  double r2 = 0.0;
  for (std::size_t k = 0; k < dim; ++k) r2 += (c[k] - pts[0][k]) * (c[k] - pts[0][k]);
  return std::sqrt(r2);
}

}  // namespace detail

double circumradius(const PointCloud& vertices) {
  const auto p = pointers(vertices);
  check_volume(vertices.dim(), p);
  return detail::circumradius_raw(vertices.dim(), p);
}

std::vector<double> circumcenter(const PointCloud& vertices) {
  const auto p = pointers(vertices);
  check_volume(vertices.dim(), p);
  std::vector<double> c(vertices.dim());
  detail::circumcenter_raw(vertices.dim(), p, c.data());
  return c;
}

}  // namespace dspace::geometry
