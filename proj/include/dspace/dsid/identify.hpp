#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dspace/dsid/labeled_cloud.hpp"
#include "dspace/dsid/model.hpp"
#include "dspace/geometry/alpha_shape.hpp"
#include "dspace/surrogate/interpolator.hpp"

namespace dspace::dsid {

/// Bisection settings for the alpha multiplier. The radius tried is
/// base * multiplier; base <= 0 selects 1 / dim (the normalized box).
struct AlphaSearchOptions {
  double m_lower = 1e-3;
  double m_upper = 1e3;
  double tol = 1e-3;
  int iter_max = 50;
  int repair_attempts = 60;
  double base = 0.0;
};

struct AlphaSearchResult {
  geometry::AlphaShape shape;
  double alpha_radius = 0.0;
  double multiplier = 0.0;
  double m_lower = 0.0;  // final bracket
  double m_upper = 0.0;
  double base = 0.0;
  std::size_t n_sat = 0;
  std::size_t v_num = 0;
  /// Indices into the violated cloud of the points inside the shape.
  std::vector<std::size_t> inside;
  int iterations = 0;
  bool max_iterations = false;
  std::vector<std::string> warnings;
};

/// Largest multiplier on the bisection path whose shape over `sat` holds at
/// most v_max_pct percent violated points: v_num <= v_max_pct (n_sat + v_num) / 100.
/// The bracket is repaired by halving the lower / doubling the upper end;
/// an upper end that never violates is accepted once its shape is the convex
/// hull. Throws BracketInvalid when repair fails and EmptyShape when the
/// returned radius keeps no simplex.
AlphaSearchResult find_alpha_radius(const geometry::Triangulation& sat, const geometry::PointCloud& vio,
                                    double v_max_pct, const AlphaSearchOptions& options = {});
AlphaSearchResult find_alpha_radius(const geometry::PointCloud& sat, const geometry::PointCloud& vio,
                                    double v_max_pct, const AlphaSearchOptions& options = {});

struct InShapeViolation {
  std::size_t row = 0;  // row of the labeled cloud
  std::vector<double> decisions;
  std::vector<double> kpis;
  std::vector<double> violation_percent;  // per constraint
};

/// One step of a method's outer loop: a tolerance level or a sample power.
struct IdentifyStep {
  double v_max_pct = 0.0;
  int power = -1;
  double alpha_radius = 0.0;
  int n_regions = 0;
  std::size_t v_num = 0;
  std::size_t n_sat = 0;
};

struct DesignSpaceResult {
  std::string method;  // tolerance | resolution_support | combinatorial
  geometry::AlphaShape shape;  // normalized coordinates, normalization = bounds
  double v_max_pct = 0.0;
  double alpha_radius = 0.0;
  double alpha_multiplier = 0.0;
  int n_regions = 0;
  std::size_t n_sat_used = 0;
  std::size_t n_vio = 0;
  std::size_t n_vio_inside = 0;
  double vio_inside_pct = 0.0;
  std::vector<std::string> constraint_names;
  std::vector<InShapeViolation> violations;
  int extra_power = -1;
  std::size_t extra_points = 0;
  std::size_t extra_sat = 0;
  double size_normalized = 0.0;
  double size_physical = 0.0;
  std::string size_unit;
  bool max_iterations = false;
  std::vector<std::string> warnings;
  std::vector<IdentifyStep> history;
  nlohmann::json audit;  // null unless extras were re-simulated
  double seconds = 0.0;

  nlohmann::json to_json(bool with_timing = true) const;
  static DesignSpaceResult from_json(const nlohmann::json& j);
};

struct IdentifyOptions {
  AlphaSearchOptions search;
  double tolerance_step = 0.25;  // percent
  double tolerance_cap = 5.0;    // percent
  double comb_v_max = 0.25;      // percent
  unsigned start_power = 10;
  unsigned max_power = 16;
  /// When set, re-simulates a random share of the predicted-satisfied extras.
  const ProcessModel* audit_model = nullptr;
  double audit_fraction = 0.05;
  std::uint64_t seed = 0;
};

/// Raises the tolerance from 0 in fixed steps until the shape is one region.
/// Throws NoUnifiedShape past tolerance_cap.
DesignSpaceResult identify_tolerance(const LabeledCloud& cloud, const DesignProblem& problem,
                                     const IdentifyOptions& options = {});

/// Adds interpolator-predicted satisfied Sobol points in powers of two until
/// the zero-tolerance shape is one region. Throws NoUnifiedShape past max_power.
DesignSpaceResult identify_resolution_support(const LabeledCloud& cloud, const DesignProblem& problem,
                                              const surrogate::Interpolator& interpolator,
                                              const IdentifyOptions& options = {});

/// Resolution support with tolerance comb_v_max.
DesignSpaceResult identify_combinatorial(const LabeledCloud& cloud, const DesignProblem& problem,
                                         const surrogate::Interpolator& interpolator,
                                         const IdentifyOptions& options = {});

/// Shared loop of the two interpolator-backed methods.
DesignSpaceResult identify_with_extras(const LabeledCloud& cloud, const DesignProblem& problem,
                                       const surrogate::Interpolator& interpolator, double v_max_pct,
                                       const std::string& method, const IdentifyOptions& options);

}  // namespace dspace::dsid
