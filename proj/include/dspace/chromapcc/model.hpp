#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dspace::chromapcc {

/// Column and resin parameters. Units follow the parameter file: lengths in
/// cm, diffusivities in cm^2/s, concentrations in mg/ml, rate constants in
/// ml/(mg min).
struct ColumnParams {
  double length = 0.0;    // cm
  double diameter = 0.0;  // cm
  double eps_b = 0.0;
  double eps_p = 0.0;
  double R_p = 0.0;   // cm
  double D_m = 0.0;   // cm^2/s
  double D_p = 0.0;   // cm^2/s
  double D_ax = 0.0;  // cm^2/s
  double q_max = 0.0;  // mg/ml
  double K_a = 0.0;    // ml/mg
  double k_a1 = 0.0;   // ml/(mg min)
  double k_a2 = 0.0;   // ml/(mg min)
  int N = 50;
  std::string calibration;  // free text, e.g. "UNCALIBRATED"

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  double area() const;    // cm^2
  double volume() const;  // ml
  /// Interstitial velocity in cm/s for a volumetric flow in ml/min.
  double interstitial_velocity(double flow_ml_min) const;

  nlohmann::json to_json() const;
  static ColumnParams from_json(const nlohmann::json& j);
  static ColumnParams load(const std::string& path);
};

/// Per-node column state.
struct ColumnState {
  std::vector<double> c, cp, q1, q2;

  ColumnState() = default;
  explicit ColumnState(std::size_t n) : c(n, 0.0), cp(n, 0.0), q1(n, 0.0), q2(n, 0.0) {}
  std::size_t size() const { return c.size(); }
};

/// Fractional coverage of site 1 relative to its equilibrium with the feed.
double fractional_coverage(double q1, const ColumnParams& p, double c_feed);
double film_coefficient(const ColumnParams& p, double u_cm_s);  // cm/s
double pore_coefficient(const ColumnParams& p, double alpha);   // cm/s, floored at 1e-12

/// Harmonic combination of film and pore coefficients (cm/s). `saturated` is
/// set when alpha reaches 1 - 1e-12 and the pore coefficient is clamped; with
/// `strict` that case throws SaturationSingularity instead.
double lumped_ktot(double q1, const ColumnParams& p, double c_feed, double u_cm_s,
                   bool* saturated = nullptr, bool strict = false);

/// (dq1/dt, dq2/dt) in mg/(ml min).
std::pair<double, double> adsorption_rhs(double cp, double q1, double q2, const ColumnParams& p);
/// Analytic steady state of the two-site isotherm.
std::pair<double, double> equilibrium_loading(double cp, const ColumnParams& p);

/// dc/dt per node (mg/(ml min)) for a column fed at `c_in` with interstitial
/// velocity `u_cm_s`.
std::vector<double> bulk_rhs(const ColumnState& s, const ColumnParams& p, double c_in,
                             double u_cm_s, double c_feed);
/// dc_p/dt per node.
std::vector<double> particle_rhs(const ColumnState& s, const ColumnParams& p, double u_cm_s,
                                 double c_feed);

/// Mass held in a column (mg), trapezoidal over the nodes.
double column_inventory(const ColumnState& s, const ColumnParams& p);

namespace detail {
/// Node-major layout: [c, cp, q1, q2] per node. Writes dy for one column.
void column_rhs(const double* y, double* dy, const ColumnParams& p, double c_in, double u_cm_s,
                double c_feed, int* saturation_count);
/// Concentration of the stream leaving a column: total outlet flux (advective
/// plus the dispersive flux implied by the outlet closure) divided by the flow,
/// so that downstream inlets receive exactly the mass that leaves.
double outlet_concentration(const double* y, const ColumnParams& p, double u_cm_s);
}  // namespace detail

}  // namespace dspace::chromapcc
