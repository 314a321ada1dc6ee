#include "rosenbrock.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dspace/error.hpp"

namespace dspace::chromapcc::detail {

namespace {

const double kD = 1.0 / (2.0 + std::sqrt(2.0));
const double kE32 = 6.0 + std::sqrt(2.0);

// Column-major band Jacobian with kl extra rows on top for the LU fill-in.
class BandMatrix {
 public:
  BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1) {
    a_.assign(static_cast<std::size_t>(ld_) * n, 0.0);
  }
  double& at(int i, int j) { return a_[static_cast<std::size_t>(kl_ + ku_ + i - j) + j * static_cast<std::size_t>(ld_)]; }
  double* data() { return a_.data(); }
  int ld() const { return ld_; }
  void zero() { std::fill(a_.begin(), a_.end(), 0.0); }

 private:
  int n_, kl_, ku_, ld_;
  std::vector<double> a_;
};

class Workspace {
 public:
  explicit Workspace(const BandedOde& ode)
      : ode_(ode),
        jac_(ode.n, ode.kl, ode.ku),
        w_(ode.n, ode.kl, ode.ku),
        ipiv_(ode.n),
        f0(ode.n),
        f1(ode.n),
        f2(ode.n),
        k1(ode.n),
        k2(ode.n),
        k3(ode.n),
        ytmp(ode.n),
        ynew(ode.n),
        fp_(ode.n) {}

  void jacobian(const std::vector<double>& y, IntegratorStats& stats) {
    const int n = ode_.n, kl = ode_.kl, ku = ode_.ku;
    const int groups = kl + ku + 1;
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    std::vector<double> yp = y;
    std::vector<double> delta(n);
    jac_.zero();
    for (int g = 0; g < groups; ++g) {
      for (int j = g; j < n; j += groups) {
        delta[j] = sqrt_eps * std::max(std::abs(y[j]), 1e-5);
        yp[j] = y[j] + delta[j];
        delta[j] = yp[j] - y[j];
      }
      ode_.rhs(yp.data(), fp_.data());
      ++stats.rhs_evals;
      for (int j = g; j < n; j += groups) {
        const int lo = std::max(0, j - ku), hi = std::min(n - 1, j + kl);
        for (int i = lo; i <= hi; ++i) jac_.at(i, j) = (fp_[i] - f0[i]) / delta[j];
        yp[j] = y[j];
      }
    }
  }

  void factor(double h) {
    const int n = ode_.n, kl = ode_.kl, ku = ode_.ku;
    w_.zero();
    for (int j = 0; j < n; ++j) {
      const int lo = std::max(0, j - ku), hi = std::min(n - 1, j + kl);
      for (int i = lo; i <= hi; ++i) w_.at(i, j) = (i == j ? 1.0 : 0.0) - h * kD * jac_.at(i, j);
    }
    const int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, w_.data(), w_.ld(), ipiv_.data());
    if (info != 0) throw IntegrationFailure("singular iteration matrix (dgbtrf info " + std::to_string(info) + ")");
  }

  void solve(std::vector<double>& b) {
    const int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', ode_.n, ode_.kl, ode_.ku, 1, w_.data(),
                                    w_.ld(), ipiv_.data(), b.data(), ode_.n);
    if (info != 0) throw IntegrationFailure("banded solve failed");
  }

 private:
  const BandedOde& ode_;
  BandMatrix jac_;
  BandMatrix w_;
  std::vector<lapack_int> ipiv_;

 public:
  std::vector<double> f0, f1, f2, k1, k2, k3, ytmp, ynew;

 private:
  std::vector<double> fp_;
};

}  // namespace

void integrate(const BandedOde& ode, std::vector<double>& y, double t0, double t1, double& h,
               const StepControl& ctl, IntegratorStats& stats,
               const std::function<void(double, const std::vector<double>&)>& on_step) {
  const int n = ode.n;
  if (static_cast<int>(y.size()) != n) throw IntegrationFailure("state size mismatch");
  if (t1 <= t0) return;
  Workspace ws(ode);
  double t = t0;
  h = std::clamp(h, ctl.h_min, t1 - t0);
  ode.rhs(y.data(), ws.f0.data());
  ++stats.rhs_evals;
  bool need_jac = true;
  std::size_t steps_here = 0;

  while (t < t1) {
    if (++steps_here > ctl.max_steps) {
      throw IntegrationFailure("step limit exceeded at t = " + std::to_string(t));
    }
    bool last = false;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    if (need_jac) {
      ws.jacobian(y, stats);
      need_jac = false;
    }
    ws.factor(h);

    ws.k1 = ws.f0;
    ws.solve(ws.k1);

    for (int i = 0; i < n; ++i) ws.ytmp[i] = y[i] + 0.5 * h * ws.k1[i];
    ode.rhs(ws.ytmp.data(), ws.f1.data());
    ++stats.rhs_evals;
    for (int i = 0; i < n; ++i) ws.k2[i] = ws.f1[i] - ws.k1[i];
    ws.solve(ws.k2);
    for (int i = 0; i < n; ++i) {
      ws.k2[i] += ws.k1[i];
      ws.ynew[i] = y[i] + h * ws.k2[i];
    }
    ode.rhs(ws.ynew.data(), ws.f2.data());
    ++stats.rhs_evals;
    for (int i = 0; i < n; ++i)
      ws.k3[i] = ws.f2[i] - kE32 * (ws.k2[i] - ws.f1[i]) - 2.0 * (ws.k1[i] - ws.f0[i]);
    ws.solve(ws.k3);

    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = h / 6.0 * (ws.k1[i] - 2.0 * ws.k2[i] + ws.k3[i]);
      const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ws.ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) err = 1e10;

    const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -1.0 / 3.0), 0.2, 5.0);
    if (err <= 1.0) {
      t = last ? t1 : t + h;
      ++stats.steps;
      bool clipped = false;
      for (int i = 0; i < n; ++i) {
        if (ws.ynew[i] < 0.0) {
          if (ws.ynew[i] < -1e-10) ++stats.negative_clips;
          ws.ynew[i] = 0.0;
          clipped = true;
        }
      }
      y.swap(ws.ynew);
      if (clipped) {
        ode.rhs(y.data(), ws.f0.data());
        ++stats.rhs_evals;
      } else {
        ws.f0.swap(ws.f2);
      }
      if (on_step) on_step(t, y);
      if (!last) h *= factor;
      need_jac = true;
    } else {
      ++stats.rejected;
      h *= std::min(factor, 0.5);
      if (h < ctl.h_min) {
        throw IntegrationFailure("step size collapsed to " + std::to_string(h) + " at t = " +
                                 std::to_string(t));
      }
    }
  }
}

}  // namespace dspace::chromapcc::detail
