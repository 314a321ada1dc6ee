#pragma once

// Floating-point expansion arithmetic (nonoverlapping sums of doubles) used as
// the exact fallback for geometric predicates whose filtered evaluation is
// inconclusive. Components are kept in increasing order of magnitude with
// zeros removed, so the sign of the expansion is the sign of its last term.

#include <cmath>
#include <vector>

namespace dspace::geometry::detail {

inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void two_prod(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

class Expansion {
 public:
  Expansion() = default;
  explicit Expansion(double v) {
    if (v != 0.0) c_.push_back(v);
  }

  static Expansion diff(double a, double b) {
    double x, y;
    two_sum(a, -b, x, y);
    Expansion e;
    if (y != 0.0) e.c_.push_back(y);
    if (x != 0.0) e.c_.push_back(x);
    return e;
  }

  int sign() const {
    if (c_.empty()) return 0;
    return c_.back() > 0.0 ? 1 : -1;
  }

  Expansion operator-() const {
    Expansion r = *this;
    for (double& v : r.c_) v = -v;
    return r;
  }

  friend Expansion operator+(const Expansion& a, const Expansion& b) {
    const Expansion& big = a.c_.size() >= b.c_.size() ? a : b;
    const Expansion& small = a.c_.size() >= b.c_.size() ? b : a;
    Expansion r = big;
    for (double v : small.c_) r.grow(v);
    return r;
  }
  friend Expansion operator-(const Expansion& a, const Expansion& b) { return a + (-b); }

  friend Expansion operator*(const Expansion& a, const Expansion& b) {
    Expansion r;
    for (double v : b.c_) r = r + a.scaled(v);
    return r;
  }

 private:
  void grow(double b) {
    std::vector<double> out;
    out.reserve(c_.size() + 1);
    double q = b;
    for (double e : c_) {
      double x, h;
      two_sum(q, e, x, h);
      if (h != 0.0) out.push_back(h);
      q = x;
    }
    if (q != 0.0 || out.empty()) out.push_back(q);
    if (out.size() == 1 && out[0] == 0.0) out.clear();
    c_ = std::move(out);
  }

  Expansion scaled(double b) const {
    Expansion r;
    if (c_.empty() || b == 0.0) return r;
    r.c_.reserve(2 * c_.size());
    double q, h;
    two_prod(c_[0], b, q, h);
    if (h != 0.0) r.c_.push_back(h);
    for (std::size_t i = 1; i < c_.size(); ++i) {
      double t_hi, t_lo;
      two_prod(c_[i], b, t_hi, t_lo);
      double s, e;
      two_sum(q, t_lo, s, e);
      if (e != 0.0) r.c_.push_back(e);
      two_sum(t_hi, s, q, e);
      if (e != 0.0) r.c_.push_back(e);
    }
    if (q != 0.0) r.c_.push_back(q);
    return r;
  }

  std::vector<double> c_;
};

}  // namespace dspace::geometry::detail
