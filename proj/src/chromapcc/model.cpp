#include "dspace/chromapcc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "dspace/error.hpp"

namespace dspace::chromapcc {

namespace {

constexpr double kAlphaLimit = 1.0 - 1e-12;
constexpr double kPoreFloor = 1e-12;  // cm/s
constexpr double kSecondsPerMinute = 60.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("column parameter check failed: " + what);
}

std::vector<double> pack(const ColumnState& s) {
  std::vector<double> y(4 * s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    y[4 * i] = s.c[i];
    y[4 * i + 1] = s.cp[i];
    y[4 * i + 2] = s.q1[i];
    y[4 * i + 3] = s.q2[i];
  }
  return y;
}

}  // namespace

void ColumnParams::validate() const {
  require(length > 0 && diameter > 0, "length and diameter must be positive");
  require(eps_b > 0 && eps_b < 1, "eps_b must lie in (0,1)");
  require(eps_p > 0 && eps_p < 1, "eps_p must lie in (0,1)");
  require(R_p > 0 && D_m > 0 && D_p > 0, "R_p, D_m and D_p must be positive");
  require(D_ax >= 0, "D_ax must be nonnegative");
  require(q_max > 0 && K_a > 0, "q_max and K_a must be positive");
  require(k_a1 > 0 && k_a2 > 0, "k_a1 and k_a2 must be positive");
  require(N >= 10, "N must be at least 10");
}

double ColumnParams::area() const { return std::numbers::pi * diameter * diameter / 4.0; }
double ColumnParams::volume() const { return area() * length; }

double ColumnParams::interstitial_velocity(double flow_ml_min) const {
  return flow_ml_min / (area() * eps_b) / kSecondsPerMinute;
}

nlohmann::json ColumnParams::to_json() const {
  return {{"calibration", calibration},
          {"units",
           {{"length", "cm"},
            {"diameter", "cm"},
            {"eps_b", "-"},
            {"eps_p", "-"},
            {"R_p", "cm"},
            {"D_m", "cm^2/s"},
            {"D_p", "cm^2/s"},
            {"D_ax", "cm^2/s"},
            {"q_max", "mg/ml"},
            {"K_a", "ml/mg"},
            {"k_a1", "ml/(mg min)"},
            {"k_a2", "ml/(mg min)"},
            {"N", "nodes"}}},
          {"length", length},
          {"diameter", diameter},
          {"eps_b", eps_b},
          {"eps_p", eps_p},
          {"R_p", R_p},
          {"D_m", D_m},
          {"D_p", D_p},
          {"D_ax", D_ax},
          {"q_max", q_max},
          {"K_a", K_a},
          {"k_a1", k_a1},
          {"k_a2", k_a2},
          {"N", N}};
}

ColumnParams ColumnParams::from_json(const nlohmann::json& j) {
  ColumnParams p;
  try {
    p.calibration = j.value("calibration", "");
    p.length = j.at("length").get<double>();
    p.diameter = j.at("diameter").get<double>();
    p.eps_b = j.at("eps_b").get<double>();
    p.eps_p = j.at("eps_p").get<double>();
    p.R_p = j.at("R_p").get<double>();
    p.D_m = j.at("D_m").get<double>();
    p.D_p = j.at("D_p").get<double>();
    p.D_ax = j.at("D_ax").get<double>();
    p.q_max = j.at("q_max").get<double>();
    p.K_a = j.at("K_a").get<double>();
    p.k_a1 = j.at("k_a1").get<double>();
    p.k_a2 = j.at("k_a2").get<double>();
    p.N = j.value("N", 50);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("column parameters: ") + e.what());
  }
  p.validate();
  return p;
}

ColumnParams ColumnParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameter file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return from_json(j);
}

double fractional_coverage(double q1, const ColumnParams& p, double c_feed) {
  if (!(c_feed > 0.0)) throw InvalidArgument("fractional coverage needs c_feed > 0");
  return q1 / p.q_max * (1.0 / p.K_a + c_feed) / c_feed;
}

double film_coefficient(const ColumnParams& p, double u_cm_s) {
  if (u_cm_s <= 0.0) return 0.0;
  return p.D_m / (2.0 * p.R_p) * 1.09 / p.eps_b * std::cbrt(2.0 * u_cm_s * p.R_p / p.D_m);
}

double pore_coefficient(const ColumnParams& p, double alpha) {
  const double a = std::clamp(alpha, 0.0, 1.0);
  const double r = std::cbrt(1.0 - a);
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  return std::max(p.eps_p * p.D_p / p.R_p * r / (1.0 - r), kPoreFloor);
}

double lumped_ktot(double q1, const ColumnParams& p, double c_feed, double u_cm_s,
                   bool* saturated, bool strict) {
  const double alpha = fractional_coverage(q1, p, c_feed);
  const bool sat = alpha >= kAlphaLimit;
  if (saturated) *saturated = sat;
  if (sat && strict) {
    throw SaturationSingularity("fractional coverage " + std::to_string(alpha) + " reached 1");
  }
  const double kf = film_coefficient(p, u_cm_s);
  if (kf == 0.0) return 0.0;
  const double ks = pore_coefficient(p, alpha);
  if (std::isinf(ks)) return kf;
  return 1.0 / (1.0 / kf + 1.0 / ks);
}

std::pair<double, double> adsorption_rhs(double cp, double q1, double q2, const ColumnParams& p) {
  return {p.k_a1 * (cp * (p.q_max - q1) - q1 / p.K_a),
          p.k_a2 * (cp * (q1 - q2) - q2 / p.K_a)};
}

std::pair<double, double> equilibrium_loading(double cp, const ColumnParams& p) {
  const double theta = p.K_a * cp / (1.0 + p.K_a * cp);
  const double q1 = p.q_max * theta;
  return {q1, q1 * theta};
}

namespace detail {

void column_rhs(const double* y, double* dy, const ColumnParams& p, double c_in, double u_cm_s,
                double c_feed, int* saturation_count) {
  const int n = p.N;
  const double dx = p.length / (n - 1);
  const double u = u_cm_s * kSecondsPerMinute;
  const double dax = p.D_ax * kSecondsPerMinute;
  const double phase = (1.0 - p.eps_b) / p.eps_b;
  const double shape = 3.0 / p.R_p;
  const double kf = film_coefficient(p, u_cm_s);
  const double ks_scale = p.eps_p * p.D_p / p.R_p;
  const double inv_ka = 1.0 / p.K_a;
  const double alpha_scale = c_feed > 0.0 ? (inv_ka + c_feed) / (c_feed * p.q_max) : 0.0;

  for (int i = 0; i < n; ++i) {
    const double* node = y + 4 * i;
    const double c = node[0], cp = node[1], q1 = node[2], q2 = node[3];
    double transport = 0.0;
    if (u > 0.0) {
      const double c_next = i + 1 < n ? y[4 * (i + 1)] : 2.0 * c - y[4 * (i - 1)];
      if (dax > 0.0) {
        double c_prev;
        if (i > 0) {
          c_prev = y[4 * (i - 1)];
        } else {
          // Danckwerts: u (c_in - c_0) = -D dc/dx at the inlet.
          const double c1 = y[4];
          c_prev = c1 - 2.0 * dx * u * (c - c_in) / dax;
        }
        transport = dax * (c_next - 2.0 * c + c_prev) / (dx * dx) -
                    u * (c_next - c_prev) / (2.0 * dx);
      } else {
        const double c_prev = i > 0 ? y[4 * (i - 1)] : c_in;
        transport = -u * (c - c_prev) / dx;
      }
    }

    double kt = 0.0;
    if (kf > 0.0 && c_feed > 0.0) {
      const double alpha = std::clamp(q1 * alpha_scale, 0.0, 1.0);
      if (alpha >= kAlphaLimit && saturation_count) ++*saturation_count;
      const double r = std::cbrt(1.0 - alpha);
      if (r >= 1.0) {
        kt = kf;
      } else {
        const double ks = std::max(ks_scale * r / (1.0 - r), kPoreFloor);
        kt = 1.0 / (1.0 / kf + 1.0 / ks);
      }
    }
    const double flux = shape * kt * kSecondsPerMinute * (c - cp);
    const double dq1 = p.k_a1 * (cp * (p.q_max - q1) - q1 * inv_ka);
    const double dq2 = p.k_a2 * (cp * (q1 - q2) - q2 * inv_ka);

    double* d = dy + 4 * i;
    d[0] = transport - phase * flux;
    d[1] = flux / p.eps_p - (dq1 + dq2) * (1.0 - p.eps_p) / p.eps_p;
    d[2] = dq1;
    d[3] = dq2;
  }
}

double outlet_concentration(const double* y, const ColumnParams& p, double u_cm_s) {
  const int n = p.N;
  const double c_last = y[4 * (n - 1)];
  if (u_cm_s <= 0.0 || p.D_ax == 0.0) return c_last;
  const double dx = p.length / (n - 1);
  const double grad = (c_last - y[4 * (n - 2)]) / dx;
  return std::max(c_last - p.D_ax / u_cm_s * grad, 0.0);
}

}  // namespace detail

std::vector<double> bulk_rhs(const ColumnState& s, const ColumnParams& p, double c_in,
                             double u_cm_s, double c_feed) {
  if (static_cast<int>(s.size()) != p.N) throw DimensionMismatch("state size differs from N");
  const auto y = pack(s);
  std::vector<double> dy(y.size());
  detail::column_rhs(y.data(), dy.data(), p, c_in, u_cm_s, c_feed, nullptr);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = dy[4 * i];
  return out;
}

std::vector<double> particle_rhs(const ColumnState& s, const ColumnParams& p, double u_cm_s,
                                 double c_feed) {
  if (static_cast<int>(s.size()) != p.N) throw DimensionMismatch("state size differs from N");
  const auto y = pack(s);
  std::vector<double> dy(y.size());
  detail::column_rhs(y.data(), dy.data(), p, 0.0, u_cm_s, c_feed, nullptr);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = dy[4 * i + 1];
  return out;
}

double column_inventory(const ColumnState& s, const ColumnParams& p) {
  const std::size_t n = s.size();
  const double dx = p.length / (n - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 * dx : dx;
    total += w * (p.eps_b * s.c[i] + (1.0 - p.eps_b) * p.eps_p * s.cp[i] +
                  (1.0 - p.eps_b) * (1.0 - p.eps_p) * (s.q1[i] + s.q2[i]));
  }
  return total * p.area();
}

}  // namespace dspace::chromapcc
