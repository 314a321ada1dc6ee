#pragma once

// Brute-force containment over every retained simplex, with orientation
// tests in long double instead of the library's barycentric solve.

#include <array>
#include <cstddef>
#include <span>

#include "dspace/geometry/alpha_shape.hpp"

namespace oracle {

inline long double orient2(const double* a, const double* b, const double* c) {
  return (static_cast<long double>(b[0]) - a[0]) * (static_cast<long double>(c[1]) - a[1]) -
         (static_cast<long double>(b[1]) - a[1]) * (static_cast<long double>(c[0]) - a[0]);
}

inline long double orient3(const double* a, const double* b, const double* c, const double* d) {
  long double m[3][3];
  for (int i = 0; i < 3; ++i) {
    m[0][i] = static_cast<long double>(b[i]) - a[i];
    m[1][i] = static_cast<long double>(c[i]) - a[i];
    m[2][i] = static_cast<long double>(d[i]) - a[i];
  }
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Inside when replacing each vertex by q keeps the orientation sign (or zero
// within `slack` times the simplex measure).
inline bool in_simplex(const dspace::geometry::AlphaShape& s, std::size_t t, const double* q, long double slack) {
  const auto idx = s.simplex(t);
  const auto& P = s.points();
  if (s.dim() == 2) {
    const double* v[3] = {P[idx[0]].data(), P[idx[1]].data(), P[idx[2]].data()};
    const long double full = orient2(v[0], v[1], v[2]);
    for (int k = 0; k < 3; ++k) {
      const double* w[3] = {v[0], v[1], v[2]};
      w[k] = q;
      if (orient2(w[0], w[1], w[2]) / full < -slack) return false;
    }
    return true;
  }
  const double* v[4] = {P[idx[0]].data(), P[idx[1]].data(), P[idx[2]].data(), P[idx[3]].data()};
  const long double full = orient3(v[0], v[1], v[2], v[3]);
  for (int k = 0; k < 4; ++k) {
    const double* w[4] = {v[0], v[1], v[2], v[3]};
    w[k] = q;
    if (orient3(w[0], w[1], w[2], w[3]) / full < -slack) return false;
  }
  return true;
}

inline bool shape_contains(const dspace::geometry::AlphaShape& s, std::span<const double> q,
                           long double slack = 1e-9L) {
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (in_simplex(s, t, q.data(), slack)) return true;
  }
  return false;
}

}  // namespace oracle
