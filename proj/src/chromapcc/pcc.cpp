#include "dspace/chromapcc/pcc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dspace/error.hpp"
#include "dspace/util/csv.hpp"
#include "rosenbrock.hpp"

namespace dspace::chromapcc {

namespace {

// Validated operating envelope of the reference model; outside it we only warn.
constexpr double kCFeedLo = 0.2, kCFeedHi = 0.77;
constexpr double kQLo = 0.5, kQHi = 1.5;

double inventory(const double* y, const ColumnParams& p) {
  const int n = p.N;
  const double dx = p.length / (n - 1);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* node = y + 4 * i;
    const double w = (i == 0 || i + 1 == n) ? 0.5 * dx : dx;
    total += w * (p.eps_b * node[0] + (1.0 - p.eps_b) * p.eps_p * node[1] +
                  (1.0 - p.eps_b) * (1.0 - p.eps_p) * (node[2] + node[3]));
  }
  return total * p.area();
}

enum class Step { A, B, C };

}  // namespace

void CycleSchedule::validate() const {
  if (!(frac_A > 0.0 && frac_B > 0.0 && frac_A + frac_B < 1.0)) {
    throw ConfigError("schedule fractions must be positive and leave room for step C");
  }
  if (!(wash_flow_ratio > 0.0)) throw ConfigError("wash_flow_ratio must be positive");
  if (!(recovery >= 0.0 && recovery <= 1.0)) throw ConfigError("recovery must lie in [0,1]");
}

nlohmann::json CycleSchedule::to_json() const {
  return {{"frac_A", frac_A},
          {"frac_B", frac_B},
          {"wash_flow_ratio", wash_flow_ratio},
          {"recovery", recovery}};
}

CycleSchedule CycleSchedule::from_json(const nlohmann::json& j) {
  CycleSchedule s;
  s.frac_A = j.value("frac_A", s.frac_A);
  s.frac_B = j.value("frac_B", s.frac_B);
  s.wash_flow_ratio = j.value("wash_flow_ratio", s.wash_flow_ratio);
  s.recovery = j.value("recovery", s.recovery);
  s.validate();
  return s;
}

nlohmann::json KpiResult::to_json() const {
  return {{"yield", yield},
          {"productivity", productivity},
          {"product_mass", product_mass},
          {"fed_mass", fed_mass},
          {"waste_mass", waste_mass},
          {"elution_loss", elution_loss},
          {"holdup_change", holdup_change},
          {"mass_balance_error", mass_balance_error},
          {"cycles", cycles},
          {"converged", converged},
          {"steps", steps},
          {"negative_clips", negative_clips},
          {"saturation_clamps", saturation_clamps},
          {"warnings", warnings}};
}

KpiResult simulate(const DecisionVector& dd, const ColumnParams& params,
                   const CycleSchedule& schedule, const SimOptions& options) {
  params.validate();
  schedule.validate();
  if (!(dd.c_feed >= 0.0) || !(dd.Q_feed > 0.0) || !(dd.T_switch > 0.0)) {
    throw InvalidArgument("need c_feed >= 0, Q_feed > 0 and T_switch > 0");
  }
  KpiResult r;
  if (dd.c_feed < kCFeedLo || dd.c_feed > kCFeedHi) {
    r.warnings.push_back("c_feed outside the validated range [0.2, 0.77] mg/ml");
  }
  if (dd.Q_feed < kQLo || dd.Q_feed > kQHi) {
    r.warnings.push_back("Q_feed outside the validated range [0.5, 1.5] ml/min");
  }
  const double T = dd.T_switch;
  r.fed_mass = dd.c_feed * dd.Q_feed * T;
  if (dd.c_feed == 0.0) {
    r.yield = 100.0;
    r.converged = true;
    return r;
  }

  const int N = params.N;
  const int block = 4 * N;
  const int waste = 2 * block;
  const double Q = dd.Q_feed;
  const double Qw = schedule.wash_flow_ratio * Q;

  Step step = Step::A;
  int saturation = 0;
  detail::BandedOde ode;
  ode.n = 2 * block + 1;
  ode.kl = 8;  // outlet flux reaches back two nodes into the upstream column
  ode.ku = 4;
  ode.rhs = [&](const double* y, double* dy) {
    const double* ya = y;
    const double* yb = y + block;
    double q_a = 0.0, c_in_a = 0.0, q_b = Q, c_in_b = dd.c_feed;
    switch (step) {
      case Step::A:
        q_a = Q;
        c_in_a = dd.c_feed;
        c_in_b = detail::outlet_concentration(ya, params, params.interstitial_velocity(q_a));
        break;
      case Step::B:
        q_a = Qw;
        q_b = Q + Qw;
        c_in_b = (Qw * detail::outlet_concentration(ya, params, params.interstitial_velocity(q_a)) +
                  Q * dd.c_feed) /
                 q_b;
        break;
      case Step::C:
        break;
    }
    if (q_a > 0.0) {
      detail::column_rhs(ya, dy, params, c_in_a, params.interstitial_velocity(q_a), dd.c_feed,
                         &saturation);
    } else {
      std::fill(dy, dy + block, 0.0);
    }
    detail::column_rhs(yb, dy + block, params, c_in_b, params.interstitial_velocity(q_b),
                       dd.c_feed, &saturation);
    dy[waste] = q_b * detail::outlet_concentration(yb, params, params.interstitial_velocity(q_b));
  };

  detail::StepControl ctl;
  ctl.rtol = options.rtol;
  ctl.atol = options.atol;
  ctl.h_min = 1e-12 * T;
  detail::IntegratorStats stats;

  std::vector<double> y(ode.n, 0.0);
  double h = 1e-3;
  double t_global = 0.0;
  double prev_product = -1.0;
  int cycle = 0;
  auto run = [&](Step s, double duration) {
    step = s;
    const double start = t_global;
    std::function<void(double, const std::vector<double>&)> rec;
    if (options.trace) {
      const char tag = s == Step::A ? 'A' : (s == Step::B ? 'B' : 'C');
      rec = [&, tag, start](double t, const std::vector<double>& yy) {
        r.trace.push_back({start + t, cycle, tag, yy[4 * (N - 1)], yy[block + 4 * (N - 1)]});
      };
    }
    detail::integrate(ode, y, 0.0, duration, h, ctl, stats, rec);
    t_global += duration;
  };

  for (cycle = 1; cycle <= options.max_cycles; ++cycle) {
    const double inv_start = inventory(y.data(), params) + inventory(y.data() + block, params);
    y[waste] = 0.0;
    run(Step::A, schedule.frac_A * T);
    run(Step::B, schedule.frac_B * T);

    const double loaded = inventory(y.data(), params);
    const double product = schedule.recovery * loaded;
    const double loss = loaded - product;
    std::fill(y.begin(), y.begin() + block, 0.0);
    run(Step::C, (1.0 - schedule.frac_A - schedule.frac_B) * T);

    const double inv_end = inventory(y.data() + block, params);
    r.product_mass = product;
    r.elution_loss = loss;
    r.waste_mass = y[waste];
    r.holdup_change = inv_end - inv_start;
    r.cycles = cycle;

    // Next period: the loaded second column moves to the front, the
    // regenerated one takes its place.
    std::copy(y.begin() + block, y.begin() + 2 * block, y.begin());
    std::fill(y.begin() + block, y.begin() + 2 * block, 0.0);

    if (prev_product > 0.0 &&
        std::abs(product - prev_product) <= options.css_tol * std::abs(product)) {
      r.converged = true;
      break;
    }
    prev_product = product;
  }
  if (r.cycles > options.max_cycles) r.cycles = options.max_cycles;
  if (!r.converged) r.warnings.push_back("cyclic steady state not reached");

  const double raw_yield = r.product_mass / r.fed_mass * 100.0;
  r.yield = std::clamp(raw_yield, 0.0, 100.0);
  r.productivity = r.product_mass / (2.0 * params.volume() * T / 60.0);
  r.mass_balance_error =
      std::abs(r.fed_mass - r.product_mass - r.waste_mass - r.elution_loss - r.holdup_change) /
      r.fed_mass;
  r.steps = stats.steps;
  r.negative_clips = stats.negative_clips;
  r.saturation_clamps = static_cast<std::size_t>(saturation);
  if (r.negative_clips > 0) r.warnings.push_back("negative concentrations clipped");
  return r;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  util::write_csv_row(out, {"time_min", "cycle", "step", "c_out_col1", "c_out_col2"});
  for (const auto& t : trace) {
    util::write_csv_row(out, {util::format_double(t.time), std::to_string(t.cycle),
                              std::string(1, t.step), util::format_double(t.c_out_1),
                              util::format_double(t.c_out_2)});
  }
}

}  // namespace dspace::chromapcc
