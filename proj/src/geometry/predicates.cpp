#include "dspace/geometry/predicates.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dspace/error.hpp"
#include "expansion.hpp"

namespace dspace::geometry::predicates {

namespace {

using detail::Expansion;

// Relative error bounds for the filtered evaluations, taken a few times
// larger than the classical forward-error bounds of the same expressions.
constexpr double kOrient2dBound = 1e-15;
constexpr double kOrient3dBound = 1e-14;
constexpr double kIncircleBound = 1e-14;
constexpr double kInsphereBound = 1e-13;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

template <class T>
T det2(const T& a, const T& b, const T& c, const T& d) {
  return a * d - b * c;
}

template <class T>
T det3(const std::array<std::array<T, 3>, 3>& m) {
  return m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2]) -
         m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2]) +
         m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1]);
}

template <class T>
T det4(const std::array<std::array<T, 4>, 4>& m) {
  T acc{};
  bool first = true;
  for (int col = 0; col < 4; ++col) {
    std::array<std::array<T, 3>, 3> minor;
    for (int r = 1; r < 4; ++r) {
      int cc = 0;
      for (int c = 0; c < 4; ++c) {
        if (c == col) continue;
        minor[r - 1][cc++] = m[r][c];
      }
    }
    T term = m[0][col] * det3(minor);
    if (first) {
      acc = (col % 2 == 0) ? term : -term;
      first = false;
    } else if (col % 2 == 0) {
      acc = acc + term;
    } else {
      acc = acc - term;
    }
  }
  return acc;
}

int orient2d_exact(const double* a, const double* b, const double* c) {
  const Expansion ux = Expansion::diff(b[0], a[0]), uy = Expansion::diff(b[1], a[1]);
  const Expansion vx = Expansion::diff(c[0], a[0]), vy = Expansion::diff(c[1], a[1]);
  return det2(ux, uy, vx, vy).sign();
}

int orient3d_exact(const double* a, const double* b, const double* c, const double* d) {
  std::array<std::array<Expansion, 3>, 3> m;
  const double* rows[3] = {b, c, d};
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) m[r][k] = Expansion::diff(rows[r][k], a[k]);
  return det3(m).sign();
}

int incircle_exact(std::span<const double* const> q, const double* p) {
  std::array<std::array<Expansion, 3>, 3> m;
  for (int r = 0; r < 3; ++r) {
    const Expansion x = Expansion::diff(q[r][0], p[0]);
    const Expansion y = Expansion::diff(q[r][1], p[1]);
    m[r] = {x, y, x * x + y * y};
  }
  return det3(m).sign();
}

int insphere3_exact(std::span<const double* const> q, const double* p) {
  std::array<std::array<Expansion, 4>, 4> m;
  for (int r = 0; r < 4; ++r) {
    const Expansion x = Expansion::diff(q[r][0], p[0]);
    const Expansion y = Expansion::diff(q[r][1], p[1]);
    const Expansion z = Expansion::diff(q[r][2], p[2]);
    m[r] = {x, y, z, x * x + y * y + z * z};
  }
  return det4(m).sign();
}

// Determinant of [q_i - p, |q_i - p|^2]; positive inside for 2D.
int incircle_raw(std::span<const double* const> q, const double* p) {
  double x[3], y[3], l[3];
  for (int i = 0; i < 3; ++i) {
    x[i] = q[i][0] - p[0];
    y[i] = q[i][1] - p[1];
    l[i] = x[i] * x[i] + y[i] * y[i];
  }
  const double m0 = x[1] * y[2] - x[2] * y[1];
  const double m1 = x[0] * y[2] - x[2] * y[0];
  const double m2 = x[0] * y[1] - x[1] * y[0];
  const double det = l[0] * m0 - l[1] * m1 + l[2] * m2;
  const double perm = std::abs(l[0]) * (std::abs(x[1] * y[2]) + std::abs(x[2] * y[1])) +
                      std::abs(l[1]) * (std::abs(x[0] * y[2]) + std::abs(x[2] * y[0])) +
                      std::abs(l[2]) * (std::abs(x[0] * y[1]) + std::abs(x[1] * y[0]));
  if (std::abs(det) > kIncircleBound * perm) return sign_of(det);
  return incircle_exact(q, p);
}

// Determinant of [q_i - p, |q_i - p|^2] in 3D; positive outside.
int insphere3_raw(std::span<const double* const> q, const double* p) {
  double a[4][4];
  double aa[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 3; ++k) a[i][k] = q[i][k] - p[k];
    a[i][3] = a[i][0] * a[i][0] + a[i][1] * a[i][1] + a[i][2] * a[i][2];
    for (int k = 0; k < 4; ++k) aa[i][k] = std::abs(a[i][k]);
  }
  // Cofactor expansion along the lifted column.
  auto minor3 = [](const double (&m)[4][4], int skip, double& perm,
                   const double (&am)[4][4]) {
    int r[3], n = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) r[n++] = i;
    const double* u = m[r[0]];
    const double* v = m[r[1]];
    const double* w = m[r[2]];
    const double* au = am[r[0]];
    const double* av = am[r[1]];
    const double* aw = am[r[2]];
    perm = au[0] * (av[1] * aw[2] + av[2] * aw[1]) + au[1] * (av[0] * aw[2] + av[2] * aw[0]) +
           au[2] * (av[0] * aw[1] + av[1] * aw[0]);
    return u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
           u[2] * (v[0] * w[1] - v[1] * w[0]);
  };
  double det = 0.0, perm = 0.0;
  for (int i = 0; i < 4; ++i) {
    double pm = 0.0;
    const double m = minor3(a, i, pm, aa);
    // Lifted column is index 3; cofactor sign (-1)^(i+3).
    det += ((i + 3) % 2 == 0 ? 1.0 : -1.0) * a[i][3] * m;
    perm += aa[i][3] * pm;
  }
  if (std::abs(det) > kInsphereBound * perm) return sign_of(det);
  return insphere3_exact(q, p);
}

}  // namespace

int orient2d(const double* a, const double* b, const double* c) {
  const double l = (b[0] - a[0]) * (c[1] - a[1]);
  const double r = (b[1] - a[1]) * (c[0] - a[0]);
  const double det = l - r;
  if (std::abs(det) > kOrient2dBound * (std::abs(l) + std::abs(r))) return sign_of(det);
  return orient2d_exact(a, b, c);
}

int orient3d(const double* a, const double* b, const double* c, const double* d) {
  const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
  const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
  const double wx = d[0] - a[0], wy = d[1] - a[1], wz = d[2] - a[2];
  const double det = ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx);
  const double perm = std::abs(ux) * (std::abs(vy * wz) + std::abs(vz * wy)) +
                      std::abs(uy) * (std::abs(vx * wz) + std::abs(vz * wx)) +
                      std::abs(uz) * (std::abs(vx * wy) + std::abs(vy * wx));
  if (std::abs(det) > kOrient3dBound * perm) return sign_of(det);
  return orient3d_exact(a, b, c, d);
}

int orient(std::size_t dim, std::span<const double* const> pts) {
  if (dim == 2) return orient2d(pts[0], pts[1], pts[2]);
  if (dim == 3) return orient3d(pts[0], pts[1], pts[2], pts[3]);
  throw DimensionMismatch("orientation predicate supports only 2D and 3D");
}

int insphere(std::size_t dim, std::span<const double* const> pts, const double* p) {
  // The lifted determinant has sign (-1)^dim relative to "inside".
  if (dim == 2) return incircle_raw(pts, p);
  if (dim == 3) return -insphere3_raw(pts, p);
  throw DimensionMismatch("insphere predicate supports only 2D and 3D");
}

int insphere_sos(std::size_t dim, std::span<const double* const> pts,
                 std::span<const std::size_t> ids, const double* p, std::size_t pid) {
  const int s = insphere(dim, pts, p);
  if (s != 0) return s;

  // Points q_0..q_dim are the simplex, q_{dim+1} the query. With lifted
  // heights h_i + eps_i the determinant gains sum_i eps_i * C_i, where
  // C_i = (-1)^i * orient(q without i). The highest-priority nonzero
  // cofactor decides the sign.
  const std::size_t n = dim + 2;
  std::array<const double*, 5> q{};
  std::array<std::size_t, 5> qid{};
  for (std::size_t i = 0; i <= dim; ++i) {
    q[i] = pts[i];
    qid[i] = ids[i];
  }
  q[dim + 1] = p;
  qid[dim + 1] = pid;

  std::array<std::size_t, 5> order{};
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.begin() + n,
            [&](std::size_t a, std::size_t b) { return qid[a] < qid[b]; });

  const int parity_dim = (dim % 2 == 0) ? 1 : -1;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    std::array<const double*, 4> rest{};
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rest[m++] = q[j];
    const int o = orient(dim, std::span<const double* const>(rest.data(), dim + 1));
    if (o != 0) {
      const int parity_i = (i % 2 == 0) ? 1 : -1;
      return parity_dim * parity_i * o;
    }
  }
  return 0;  // only reachable for a degenerate simplex
}

}  // namespace dspace::geometry::predicates
