#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dspace/dsid/identify.hpp"
#include "dspace/dsid/labeled_cloud.hpp"
#include "dspace/surrogate/interpolator.hpp"

namespace dspace::analysis {

struct AorOptions {
  double tol = 1e-3;  // normalized half-width
  int iter_max = 40;
};

/// Min / mean / max of one KPI plus a 20-bin equal-width histogram.
struct KpiStat {
  std::string name;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  std::vector<double> bin_edges;  // bins + 1 entries
  std::vector<std::size_t> bin_counts;
};

struct KpiStats {
  std::size_t n_truth = 0;    // labeled samples inside the region
  std::size_t n_support = 0;  // predicted points added by densification
  std::vector<KpiStat> kpis;

  std::size_t n_samples() const { return n_truth + n_support; }
  const KpiStat& at(const std::string& name) const;
  nlohmann::json to_json() const;
  static KpiStats from_json(const nlohmann::json& j);
};

/// Region of normalized decision space: an identified space or an AOR box.
class Region {
 public:
  static Region space(const geometry::AlphaShape& shape);
  static Region box(std::vector<double> lower, std::vector<double> upper);

  bool contains(std::span<const double> unit) const;
  /// Axis-aligned bounds of the region in normalized coordinates.
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

 private:
  const geometry::AlphaShape* shape_ = nullptr;
  std::vector<double> lower_, upper_;
};

inline constexpr int kHistogramBins = 20;

/// Statistics over the labeled rows inside `region`. With an interpolator,
/// 2^support_power Sobol points drawn over the region's bounding box are
/// predicted and those inside the region added. Throws EmptyRegion.
KpiStats kpi_stats(const Region& region, const dsid::LabeledCloud& cloud,
                   const surrogate::Interpolator* interpolator = nullptr, unsigned support_power = 12);

struct AorReport {
  std::vector<std::string> decision_names;
  std::vector<double> nop;       // physical units
  std::vector<double> nop_unit;  // normalized
  double half_width = 0.0;       // normalized h*
  double bracket_upper = 0.0;    // final bisection upper end
  std::vector<double> half_range;  // physical, per decision
  std::vector<double> mpar_lower;
  std::vector<double> mpar_upper;
  double size_normalized = 0.0;  // (2h)^d
  double size_physical = 0.0;    // (2h)^d * prod(widths)
  std::string size_unit;
  std::vector<std::vector<double>> vertices;  // physical, 2^d
  int iterations = 0;
  bool max_iterations = false;
  std::vector<std::string> warnings;
  std::optional<KpiStats> stats;

  /// The AOR as a normalized box.
  Region region() const;
  nlohmann::json to_json() const;
  static AorReport from_json(const nlohmann::json& j);
};

/// Largest uniform normalized box around `nop` whose 2^d vertices all lie in
/// the space, by bisection on h over [0, 1]. Throws NopOutsideSpace.
AorReport find_aor(const dsid::DesignSpaceResult& space, std::span<const double> nop, const AorOptions& options = {});

struct MparRanges {
  std::vector<double> lower;
  std::vector<double> upper;
};
MparRanges mpar(const AorReport& report);

struct NopComparison {
  AorReport a;
  AorReport b;
  double aor_size_delta_pct = 0.0;
  std::vector<double> mpar_delta_pct;  // per decision
  /// Change of the in-AOR KPI means, per KPI; empty without statistics.
  std::vector<std::string> kpi_names;
  std::vector<double> kpi_mean_delta_pct;

  nlohmann::json to_json() const;
};

/// Percentage change from `from` to `to`; 0 when both are 0, NaN when only `from` is.
double percent_change(double from, double to);

/// AORs for both points (with KPI statistics over `cloud`) and their changes.
NopComparison compare_nops(const dsid::DesignSpaceResult& space, std::span<const double> nop_a,
                           std::span<const double> nop_b, const dsid::LabeledCloud& cloud,
                           const surrogate::Interpolator* interpolator = nullptr, const AorOptions& options = {},
                           unsigned support_power = 12);

/// Plain-text tables for terminals.
void write_text(std::ostream& out, const AorReport& report);
void write_text(std::ostream& out, const NopComparison& cmp);

}  // namespace dspace::analysis
