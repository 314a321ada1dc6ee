#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dspace/chromapcc/model.hpp"

namespace dspace::chromapcc {

/// Operating point of the twin-column process.
struct DecisionVector {
  double c_feed = 0.0;    // mg/ml
  double Q_feed = 0.0;    // ml/min
  double T_switch = 0.0;  // min
};

/// Split of one switch period into the interconnected load (A), wash with
/// combined feed (B) and batch elute/load (C) steps.
struct CycleSchedule {
  double frac_A = 0.5;
  double frac_B = 0.15;  // C takes the remainder
  /// Wash flow into column 1 during B, relative to the feed flow. Its outlet
  /// joins the fresh feed entering column 2.
  double wash_flow_ratio = 1.0;
  /// Fraction of the loaded column's holdup recovered at elution.
  double recovery = 1.0;

  void validate() const;
  nlohmann::json to_json() const;
  static CycleSchedule from_json(const nlohmann::json& j);
};

struct SimOptions {
  double rtol = 1e-6;
  double atol = 1e-8;
  double css_tol = 1e-4;
  int max_cycles = 50;
  bool trace = false;
};

struct TraceRow {
  double time;  // min since start
  int cycle;
  char step;  // 'A', 'B' or 'C'
  double c_out_1;
  double c_out_2;
};

struct KpiResult {
  double yield = 0.0;         // %
  double productivity = 0.0;  // mg/(ml h)
  double product_mass = 0.0;  // mg per switch period
  double fed_mass = 0.0;
  double waste_mass = 0.0;
  double elution_loss = 0.0;
  double holdup_change = 0.0;
  /// |fed - product - waste - elution loss - holdup change| / fed for the last period.
  double mass_balance_error = 0.0;
  int cycles = 0;
  bool converged = false;
  std::size_t steps = 0;
  std::size_t negative_clips = 0;
  std::size_t saturation_clamps = 0;
  std::vector<std::string> warnings;
  std::vector<TraceRow> trace;

  nlohmann::json to_json() const;
};

/// Runs switch periods until the product mass per period settles or
/// max_cycles is reached. Throws IntegrationFailure on step-size collapse.
KpiResult simulate(const DecisionVector& dd, const ColumnParams& params,
                   const CycleSchedule& schedule = {}, const SimOptions& options = {});

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace dspace::chromapcc
