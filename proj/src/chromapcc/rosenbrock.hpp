#pragma once

// Linearly implicit Rosenbrock 2(3) pair (the ode23s scheme) for stiff
// autonomous systems with a banded Jacobian. The Jacobian is formed by
// finite differences with column grouping; W = I - h d J is factored with
// LAPACK's banded LU.

#include <cstddef>
#include <functional>
#include <vector>

namespace dspace::chromapcc::detail {

struct BandedOde {
  int n = 0;
  int kl = 0;  // sub-diagonals
  int ku = 0;  // super-diagonals
  std::function<void(const double* y, double* dy)> rhs;
};

struct StepControl {
  double rtol = 1e-6;
  double atol = 1e-8;
  double h_min = 1e-12;
  std::size_t max_steps = 500000;
};

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  std::size_t negative_clips = 0;  // entries below -1e-10 reset to zero
};

/// Advances y from t0 to t1 in place. `h` carries the step-size guess in and
/// the last accepted step out. `on_step(t, y)` runs after each accepted step.
/// Negative entries are clipped to zero after every step. Throws
/// IntegrationFailure when the step size collapses below h_min or max_steps
/// is exceeded.
void integrate(const BandedOde& ode, std::vector<double>& y, double t0, double t1, double& h,
               const StepControl& ctl, IntegratorStats& stats,
               const std::function<void(double, const std::vector<double>&)>& on_step = {});

}  // namespace dspace::chromapcc::detail
