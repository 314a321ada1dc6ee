#pragma once

#include <cstddef>
#include <span>

namespace dspace::geometry::predicates {

// All predicates return the exact sign of their determinant: a filtered
// double-precision evaluation is used when its error bound certifies the sign,
// otherwise the determinant is recomputed with expansion arithmetic.

/// Sign of det[b - a; c - a].
int orient2d(const double* a, const double* b, const double* c);

/// Sign of det[b - a; c - a; d - a].
int orient3d(const double* a, const double* b, const double* c, const double* d);

/// Orientation of dim+1 points in dim dimensions (dim = 2 or 3).
int orient(std::size_t dim, std::span<const double* const> pts);

/// Positive when `p` lies strictly inside the circumsphere of the positively
/// oriented simplex `pts` (dim+1 vertices), negative outside, zero on it.
int insphere(std::size_t dim, std::span<const double* const> pts, const double* p);

/// insphere() resolved by simulation of simplicity: ties are broken by
/// perturbing the lifted coordinate of each point, with lower ids perturbed
/// more strongly. Never returns zero for an affinely independent simplex.
int insphere_sos(std::size_t dim, std::span<const double* const> pts,
                 std::span<const std::size_t> ids, const double* p, std::size_t pid);

}  // namespace dspace::geometry::predicates
