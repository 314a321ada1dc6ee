#include "dspace/dsid/identify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "dspace/error.hpp"
#include "dspace/geometry/triangulation.hpp"
#include "dspace/sampling/sobol.hpp"

namespace dspace::dsid {

namespace {

using Clock = std::chrono::steady_clock;

bool within_tolerance(std::size_t v_num, std::size_t n_sat, double v_max_pct) {
  return static_cast<double>(v_num) * 100.0 <= v_max_pct * static_cast<double>(n_sat + v_num);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// Evaluates the tolerance test at a multiplier. Shapes that keep the same
// simplices give the same answer, so results are cached by retained count.
class AlphaProbe {
 public:
  AlphaProbe(const geometry::Triangulation& tri, const geometry::PointCloud& vio, double base, double v_max_pct)
      : tri_(tri), vio_(vio), base_(base), v_max_(v_max_pct) {
    for (std::size_t s = 0; s < tri.size(); ++s) {
      if (tri.volumes[s] >= geometry::kDegenerateVolume) radii_.push_back(tri.circumradii[s]);
    }
    std::sort(radii_.begin(), radii_.end());
    n_sat_ = tri.points.size();
  }

  std::size_t retained(double m) const {
    return static_cast<std::size_t>(std::upper_bound(radii_.begin(), radii_.end(), base_ * m) - radii_.begin());
  }
  bool is_hull(double m) const { return retained(m) == radii_.size(); }
  std::size_t n_sat() const { return n_sat_; }

  std::size_t v_num(double m) {
    const auto key = retained(m);
    if (key == 0) return 0;
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto shape = geometry::alpha_shape(tri_, base_ * m);
    std::size_t n = 0;
    for (std::size_t i = 0; i < vio_.size(); ++i) n += shape.contains(vio_[i]) ? 1 : 0;
    cache_[key] = n;
    return n;
  }

  bool ok(double m) { return within_tolerance(v_num(m), n_sat_, v_max_); }

 private:
  const geometry::Triangulation& tri_;
  const geometry::PointCloud& vio_;
  double base_;
  double v_max_;
  std::size_t n_sat_ = 0;
  std::vector<double> radii_;
  std::map<std::size_t, std::size_t> cache_;
};

}  // namespace

AlphaSearchResult find_alpha_radius(const geometry::Triangulation& sat, const geometry::PointCloud& vio,
                                    double v_max_pct, const AlphaSearchOptions& options) {
  if (!(v_max_pct >= 0.0 && v_max_pct <= 100.0)) throw InvalidArgument("v_max% must lie in [0, 100]");
  if (!(options.m_lower > 0.0 && options.m_upper > options.m_lower)) {
    throw BracketInvalid("alpha multiplier bracket must satisfy 0 < lower < upper");
  }
  if (!(options.tol > 0.0) || options.iter_max < 1) throw InvalidArgument("bisection tolerance and iter_max must be positive");
  if (!vio.empty() && vio.dim() != sat.dim()) throw DimensionMismatch("violated points have the wrong dimension");

  AlphaSearchResult r;
  r.base = options.base > 0.0 ? options.base : 1.0 / static_cast<double>(sat.dim());
  AlphaProbe probe(sat, vio, r.base, v_max_pct);
  r.n_sat = probe.n_sat();

  double lo = options.m_lower;
  double hi = options.m_upper;
  int attempts = 0;
  while (!probe.ok(lo)) {
    if (++attempts > options.repair_attempts) {
      throw BracketInvalid("no alpha multiplier down to " + fmt(lo) + " meets v_max% = " + fmt(v_max_pct));
    }
    lo *= 0.5;
  }
  if (attempts > 0) r.warnings.push_back("lower multiplier repaired to " + fmt(lo));

  bool accept_upper = false;
  attempts = 0;
  while (probe.ok(hi)) {
    if (probe.is_hull(hi)) {
      accept_upper = true;
      break;
    }
    if (++attempts > options.repair_attempts) {
      throw BracketInvalid("upper multiplier " + fmt(hi) + " still meets the tolerance");
    }
    lo = hi;
    hi *= 2.0;
  }
  if (attempts > 0) r.warnings.push_back("upper multiplier repaired to " + fmt(hi));

  if (accept_upper) {
    lo = hi;
  } else {
    while (hi - lo > options.tol) {
      if (r.iterations >= options.iter_max) {
        r.max_iterations = true;
        r.warnings.push_back("bisection stopped at iter_max = " + std::to_string(options.iter_max) +
                             " with bracket width " + fmt(hi - lo));
        break;
      }
      const double mid = 0.5 * (lo + hi);
      if (probe.ok(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
      ++r.iterations;
    }
  }

  r.multiplier = lo;
  r.m_lower = lo;
  r.m_upper = hi;
  r.alpha_radius = r.base * lo;
  if (probe.retained(lo) == 0) {
    throw EmptyShape("no non-empty alpha shape meets v_max% = " + fmt(v_max_pct));
  }
  r.shape = geometry::alpha_shape(sat, r.alpha_radius);
  for (std::size_t i = 0; i < vio.size(); ++i) {
    if (r.shape.contains(vio[i])) r.inside.push_back(i);
  }
  r.v_num = r.inside.size();
  return r;
}

AlphaSearchResult find_alpha_radius(const geometry::PointCloud& sat, const geometry::PointCloud& vio,
                                    double v_max_pct, const AlphaSearchOptions& options) {
  return find_alpha_radius(geometry::delaunay(sat), vio, v_max_pct, options);
}

// ---- DesignSpaceResult -------------------------------------------------------

nlohmann::json DesignSpaceResult::to_json(bool with_timing) const {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : history) {
    hist.push_back({{"v_max_pct", h.v_max_pct},
                    {"power", h.power},
                    {"alpha_radius", h.alpha_radius},
                    {"n_regions", h.n_regions},
                    {"v_num", h.v_num},
                    {"n_sat", h.n_sat}});
  }
  nlohmann::json vios = nlohmann::json::array();
  for (const auto& v : violations) {
    vios.push_back({{"row", v.row}, {"decisions", v.decisions}, {"kpis", v.kpis}, {"violation_percent", v.violation_percent}});
  }
  nlohmann::json j = {{"schema_version", 1},
                      {"method", method},
                      {"v_max_pct", v_max_pct},
                      {"alpha_radius", alpha_radius},
                      {"alpha_multiplier", alpha_multiplier},
                      {"n_regions", n_regions},
                      {"n_sat_used", n_sat_used},
                      {"n_vio", n_vio},
                      {"n_vio_inside", n_vio_inside},
                      {"vio_inside_pct", vio_inside_pct},
                      {"constraint_names", constraint_names},
                      {"violations", vios},
                      {"extra_power", extra_power},
                      {"extra_points", extra_points},
                      {"extra_sat", extra_sat},
                      {"size_normalized", size_normalized},
                      {"size_physical", size_physical},
                      {"size_unit", size_unit},
                      {"max_iterations", max_iterations},
                      {"warnings", warnings},
                      {"history", hist},
                      {"audit", audit},
                      {"shape", shape.to_json()}};
  if (with_timing) j["seconds"] = seconds;
  return j;
}

DesignSpaceResult DesignSpaceResult::from_json(const nlohmann::json& j) {
  DesignSpaceResult r;
  try {
    if (j.value("schema_version", 0) != 1) throw ConfigError("design space: unsupported schema_version");
    r.method = j.at("method").get<std::string>();
    r.v_max_pct = j.at("v_max_pct").get<double>();
    r.alpha_radius = j.at("alpha_radius").get<double>();
    r.alpha_multiplier = j.at("alpha_multiplier").get<double>();
    r.n_regions = j.at("n_regions").get<int>();
    r.n_sat_used = j.at("n_sat_used").get<std::size_t>();
    r.n_vio = j.at("n_vio").get<std::size_t>();
    r.n_vio_inside = j.at("n_vio_inside").get<std::size_t>();
    r.vio_inside_pct = j.at("vio_inside_pct").get<double>();
    r.constraint_names = j.at("constraint_names").get<std::vector<std::string>>();
    for (const auto& v : j.at("violations")) {
      r.violations.push_back({v.at("row").get<std::size_t>(), v.at("decisions").get<std::vector<double>>(),
                              v.at("kpis").get<std::vector<double>>(),
                              v.at("violation_percent").get<std::vector<double>>()});
    }
    r.extra_power = j.at("extra_power").get<int>();
    r.extra_points = j.at("extra_points").get<std::size_t>();
    r.extra_sat = j.at("extra_sat").get<std::size_t>();
    r.size_normalized = j.at("size_normalized").get<double>();
    r.size_physical = j.at("size_physical").get<double>();
    r.size_unit = j.at("size_unit").get<std::string>();
    r.max_iterations = j.at("max_iterations").get<bool>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& h : j.at("history")) {
      r.history.push_back({h.at("v_max_pct").get<double>(), h.at("power").get<int>(), h.at("alpha_radius").get<double>(),
                           h.at("n_regions").get<int>(), h.at("v_num").get<std::size_t>(),
                           h.at("n_sat").get<std::size_t>()});
    }
    r.audit = j.value("audit", nlohmann::json());
    r.seconds = j.value("seconds", 0.0);
    r.shape = geometry::AlphaShape::from_json(j.at("shape"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("design space: ") + e.what());
  }
  return r;
}

// ---- identification methods --------------------------------------------------

namespace {

void require_sat(const geometry::PointCloud& sat, std::size_t dim) {
  if (sat.size() < dim + 1) {
    throw EmptyShape("only " + std::to_string(sat.size()) + " satisfied points; at least " +
                     std::to_string(dim + 1) + " are needed");
  }
}

DesignSpaceResult make_result(const std::string& method, AlphaSearchResult&& search, double v_max_pct,
                              const LabeledCloud& cloud, const DesignProblem& problem) {
  DesignSpaceResult r;
  r.method = method;
  r.v_max_pct = v_max_pct;
  r.alpha_radius = search.alpha_radius;
  r.alpha_multiplier = search.multiplier;
  r.n_regions = search.shape.n_regions();
  r.n_sat_used = search.n_sat;
  r.n_vio = cloud.n_vio();
  r.n_vio_inside = search.v_num;
  r.vio_inside_pct = search.n_sat + search.v_num == 0
                         ? 0.0
                         : 100.0 * static_cast<double>(search.v_num) / static_cast<double>(search.n_sat + search.v_num);
  for (const auto& c : problem.constraints) r.constraint_names.push_back(c.kpi);

  const auto vio_rows = cloud.vio_rows();
  for (auto i : search.inside) {
    const auto row = vio_rows[i];
    InShapeViolation v;
    v.row = row;
    v.decisions.assign(cloud.decisions[row].begin(), cloud.decisions[row].end());
    v.kpis.assign(cloud.kpis[row].begin(), cloud.kpis[row].end());
    for (const auto& c : problem.constraints) {
      v.violation_percent.push_back(c.violation_percent(cloud.kpis[row][cloud.kpi_index(c.kpi)]));
    }
    r.violations.push_back(std::move(v));
  }
  r.max_iterations = search.max_iterations;
  r.warnings = std::move(search.warnings);
  r.shape = std::move(search.shape);
  r.shape.set_normalization(problem.bounds.normalization());
  r.size_normalized = r.shape.measure();
  r.size_physical = r.size_normalized * problem.bounds.normalization().volume_scale();
  r.size_unit = problem.size_unit();
  return r;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

DesignSpaceResult identify_tolerance(const LabeledCloud& cloud, const DesignProblem& problem,
                                     const IdentifyOptions& options) {
  const auto t0 = Clock::now();
  if (!(options.tolerance_step > 0.0)) throw InvalidArgument("tolerance step must be positive");
  const auto sat = cloud.sat_points();
  require_sat(sat, problem.dim());
  const auto vio = cloud.vio_points();
  const auto tri = geometry::delaunay(sat);

  std::vector<IdentifyStep> history;
  const int n_steps = static_cast<int>(std::floor(options.tolerance_cap / options.tolerance_step + 1e-9));
  for (int k = 0; k <= n_steps; ++k) {
    const double v_max = k * options.tolerance_step;
    IdentifyStep step;
    step.v_max_pct = v_max;
    step.n_sat = sat.size();
    try {
      auto search = find_alpha_radius(tri, vio, v_max, options.search);
      step.alpha_radius = search.alpha_radius;
      step.n_regions = search.shape.n_regions();
      step.v_num = search.v_num;
      history.push_back(step);
      if (step.n_regions == 1) {
        auto r = make_result("tolerance", std::move(search), v_max, cloud, problem);
        r.history = std::move(history);
        r.seconds = seconds_since(t0);
        return r;
      }
    } catch (const EmptyShape&) {
      history.push_back(step);
    }
  }
  std::string counts;
  for (const auto& h : history) counts += (counts.empty() ? "" : ", ") + std::to_string(h.n_regions);
  throw NoUnifiedShape("no single-region shape up to v_max% = " + fmt(options.tolerance_cap) +
                       " (regions per step: " + counts + ")");
}

DesignSpaceResult identify_with_extras(const LabeledCloud& cloud, const DesignProblem& problem,
                                       const surrogate::Interpolator& interpolator, double v_max_pct,
                                       const std::string& method, const IdentifyOptions& options) {
  const auto t0 = Clock::now();
  if (options.start_power > options.max_power) throw InvalidArgument("start_power exceeds max_power");
  if (options.max_power > 24) throw InvalidArgument("max_power must not exceed 24");
  const std::size_t dim = problem.dim();
  const auto truth_sat = cloud.sat_points();
  const auto vio = cloud.vio_points();

  // Extras are drawn after every index the initial design could have used, so
  // they never repeat it, and each larger power extends the previous batch.
  const std::uint64_t used = std::max<std::uint64_t>(
      cloud.size(), (std::uint64_t{1} << problem.sampling.sp) + (problem.sampling.skip_zero ? 1 : 0));
  std::uint64_t offset = 1;
  while (offset < used) offset <<= 1;

  const auto norm = problem.bounds.normalization();
  std::vector<IdentifyStep> history;
  for (unsigned k = options.start_power; k <= options.max_power; ++k) {
    const auto batch = sampling::sobol(dim, problem.bounds, k, false, offset);
    const auto pred = interpolator.predict(batch.inputs);
    std::vector<std::string> kpi_names = cloud.kpi_names;
    if (pred.dim() != kpi_names.size()) {
      throw DimensionMismatch("interpolator returns " + std::to_string(pred.dim()) + " KPIs, cloud has " +
                              std::to_string(kpi_names.size()));
    }
    const auto extra = classify(batch.inputs, pred, kpi_names, problem);

    geometry::PointCloud sat = truth_sat;
    const auto extra_sat = extra.sat_points();
    sat.append(extra_sat);

    IdentifyStep step;
    step.v_max_pct = v_max_pct;
    step.power = static_cast<int>(k);
    step.n_sat = sat.size();
    if (sat.size() < dim + 1) {
      history.push_back(step);
      continue;
    }
    try {
      auto search = find_alpha_radius(sat, vio, v_max_pct, options.search);
      step.alpha_radius = search.alpha_radius;
      step.n_regions = search.shape.n_regions();
      step.v_num = search.v_num;
      history.push_back(step);
      if (step.n_regions != 1) continue;

      auto r = make_result(method, std::move(search), v_max_pct, cloud, problem);
      r.extra_power = static_cast<int>(k);
      r.extra_points = batch.inputs.size();
      r.extra_sat = extra_sat.size();
      r.history = std::move(history);
      if (options.audit_model != nullptr && !extra_sat.empty()) {
        const auto rows = extra.sat_rows();
        std::mt19937_64 rng(options.seed ^ 0x5bd1e9955bd1e995ULL);
        std::vector<std::size_t> pick(rows.begin(), rows.end());
        std::shuffle(pick.begin(), pick.end(), rng);
        const auto n_audit = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(options.audit_fraction * static_cast<double>(pick.size()))));
        pick.resize(std::min(n_audit, pick.size()));
        std::sort(pick.begin(), pick.end());
        geometry::PointCloud kp(kpi_names.size());
        geometry::PointCloud xs(dim);
        std::size_t failed = 0;
        for (auto i : pick) {
          try {
            kp.push_back(options.audit_model->evaluate(batch.inputs[i]));
            xs.push_back(batch.inputs[i]);
          } catch (const Error&) {
            ++failed;
          }
        }
        const auto truth = classify(xs, kp, kpi_names, problem);
        r.audit = {{"fraction", options.audit_fraction},
                   {"audited", pick.size()},
                   {"confirmed", truth.n_sat()},
                   {"rejected", truth.n_vio()},
                   {"failed", failed}};
        if (truth.n_vio() > 0) {
          r.warnings.push_back(std::to_string(truth.n_vio()) + " of " + std::to_string(pick.size()) +
                               " audited extras violate a constraint under the process model");
        }
      }
      r.seconds = seconds_since(t0);
      return r;
    } catch (const EmptyShape&) {
      history.push_back(step);
    }
  }
  throw NoUnifiedShape("no single-region shape up to 2^" + std::to_string(options.max_power) + " extra points");
}

DesignSpaceResult identify_resolution_support(const LabeledCloud& cloud, const DesignProblem& problem,
                                              const surrogate::Interpolator& interpolator,
                                              const IdentifyOptions& options) {
  return identify_with_extras(cloud, problem, interpolator, 0.0, "resolution_support", options);
}

DesignSpaceResult identify_combinatorial(const LabeledCloud& cloud, const DesignProblem& problem,
                                         const surrogate::Interpolator& interpolator,
                                         const IdentifyOptions& options) {
  return identify_with_extras(cloud, problem, interpolator, options.comb_v_max, "combinatorial", options);
}

}  // namespace dspace::dsid
