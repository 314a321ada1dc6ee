#include "dspace/analysis/aor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "dspace/error.hpp"
#include "dspace/sampling/sobol.hpp"

namespace dspace::analysis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

// ---- regions and statistics ---------------------------------------------------

Region Region::space(const geometry::AlphaShape& shape) {
  if (shape.empty()) throw EmptyShape("region from an empty shape");
  Region r;
  r.shape_ = &shape;
  const auto d = shape.dim();
  r.lower_.assign(d, std::numeric_limits<double>::infinity());
  r.upper_.assign(d, -std::numeric_limits<double>::infinity());
  for (int v : shape.vertices()) {
    const auto p = shape.points()[v];
    for (std::size_t i = 0; i < d; ++i) {
      r.lower_[i] = std::min(r.lower_[i], p[i]);
      r.upper_[i] = std::max(r.upper_[i], p[i]);
    }
  }
  return r;
}

Region Region::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.size() != upper.size()) throw DimensionMismatch("box bounds differ in length");
  Region r;
  r.lower_ = std::move(lower);
  r.upper_ = std::move(upper);
  return r;
}

bool Region::contains(std::span<const double> unit) const {
  if (shape_ != nullptr) return shape_->contains(unit);
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (unit[i] < lower_[i] || unit[i] > upper_[i]) return false;
  }
  return true;
}

const KpiStat& KpiStats::at(const std::string& name) const {
  for (const auto& k : kpis) {
    if (k.name == name) return k;
  }
  throw MissingKpi("no statistics for KPI '" + name + "'");
}

nlohmann::json KpiStats::to_json() const {
  nlohmann::json ks = nlohmann::json::array();
  for (const auto& k : kpis) {
    ks.push_back({{"name", k.name},
                  {"min", k.min},
                  {"mean", k.mean},
                  {"max", k.max},
                  {"bin_edges", k.bin_edges},
                  {"bin_counts", k.bin_counts}});
  }
  return {{"n_truth", n_truth}, {"n_support", n_support}, {"n_samples", n_samples()}, {"kpis", ks}};
}

KpiStats KpiStats::from_json(const nlohmann::json& j) {
  KpiStats s;
  try {
    s.n_truth = j.at("n_truth").get<std::size_t>();
    s.n_support = j.at("n_support").get<std::size_t>();
    for (const auto& k : j.at("kpis")) {
      s.kpis.push_back({k.at("name").get<std::string>(), k.at("min").get<double>(), k.at("mean").get<double>(),
                        k.at("max").get<double>(), k.at("bin_edges").get<std::vector<double>>(),
                        k.at("bin_counts").get<std::vector<std::size_t>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("kpi stats: ") + e.what());
  }
  return s;
}

KpiStats kpi_stats(const Region& region, const dsid::LabeledCloud& cloud, const surrogate::Interpolator* interpolator,
                   unsigned support_power) {
  const std::size_t m = cloud.kpi_names.size();
  std::vector<std::vector<double>> values(m);
  KpiStats s;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!region.contains(cloud.unit[i])) continue;
    ++s.n_truth;
    for (std::size_t k = 0; k < m; ++k) values[k].push_back(cloud.kpis[i][k]);
  }

  bool has_extent = true;
  for (std::size_t i = 0; i < region.lower().size(); ++i) has_extent = has_extent && region.upper()[i] > region.lower()[i];
  if (interpolator != nullptr && has_extent) {
    const auto d = region.lower().size();
    sampling::Bounds box{std::vector<std::string>(d), region.lower(), region.upper()};
    for (std::size_t i = 0; i < d; ++i) box.names[i] = "u" + std::to_string(i);
    const auto unit = sampling::sobol(d, box, support_power).inputs;
    geometry::PointCloud inside(d);
    for (std::size_t i = 0; i < unit.size(); ++i) {
      if (!region.contains(unit[i])) continue;
      inside.push_back(cloud.normalization.from_unit(unit[i]));
    }
    if (!inside.empty()) {
      const auto pred = interpolator->predict(inside);
      if (pred.dim() != m) throw DimensionMismatch("interpolator KPI count differs from the cloud");
      s.n_support = pred.size();
      for (std::size_t i = 0; i < pred.size(); ++i) {
        for (std::size_t k = 0; k < m; ++k) values[k].push_back(pred[i][k]);
      }
    }
  }
  if (s.n_samples() == 0) throw EmptyRegion("no samples inside the region");

  for (std::size_t k = 0; k < m; ++k) {
    KpiStat st;
    st.name = cloud.kpi_names[k];
    const auto& v = values[k];
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    st.min = *lo;
    st.max = *hi;
    double sum = 0.0;
    for (double x : v) sum += x;
    st.mean = sum / static_cast<double>(v.size());
    st.bin_edges.resize(kHistogramBins + 1);
    for (int b = 0; b <= kHistogramBins; ++b) st.bin_edges[b] = st.min + (st.max - st.min) * b / kHistogramBins;
    st.bin_edges.back() = st.max;
    st.bin_counts.assign(kHistogramBins, 0);
    const double width = st.max - st.min;
    for (double x : v) {
      int b = width > 0.0 ? static_cast<int>((x - st.min) / width * kHistogramBins) : 0;
      ++st.bin_counts[std::clamp(b, 0, kHistogramBins - 1)];
    }
    s.kpis.push_back(std::move(st));
  }
  return s;
}

// ---- AOR ---------------------------------------------------------------------

Region AorReport::region() const {
  std::vector<double> lo(nop_unit.size()), hi(nop_unit.size());
  for (std::size_t i = 0; i < nop_unit.size(); ++i) {
    lo[i] = nop_unit[i] - half_width;
    hi[i] = nop_unit[i] + half_width;
  }
  return Region::box(lo, hi);
}

nlohmann::json AorReport::to_json() const {
  nlohmann::json j = {{"schema_version", 1},
                      {"decision_names", decision_names},
                      {"nop", nop},
                      {"nop_unit", nop_unit},
                      {"half_width", half_width},
                      {"bracket_upper", bracket_upper},
                      {"half_range", half_range},
                      {"mpar_lower", mpar_lower},
                      {"mpar_upper", mpar_upper},
                      {"size_normalized", size_normalized},
                      {"size_physical", size_physical},
                      {"size_unit", size_unit},
                      {"vertices", vertices},
                      {"iterations", iterations},
                      {"max_iterations", max_iterations},
                      {"warnings", warnings}};
  j["stats"] = stats ? stats->to_json() : nlohmann::json();
  return j;
}

AorReport AorReport::from_json(const nlohmann::json& j) {
  AorReport r;
  try {
    if (j.value("schema_version", 0) != 1) throw ConfigError("aor report: unsupported schema_version");
    r.decision_names = j.at("decision_names").get<std::vector<std::string>>();
    r.nop = j.at("nop").get<std::vector<double>>();
    r.nop_unit = j.at("nop_unit").get<std::vector<double>>();
    r.half_width = j.at("half_width").get<double>();
    r.bracket_upper = j.at("bracket_upper").get<double>();
    r.half_range = j.at("half_range").get<std::vector<double>>();
    r.mpar_lower = j.at("mpar_lower").get<std::vector<double>>();
    r.mpar_upper = j.at("mpar_upper").get<std::vector<double>>();
    r.size_normalized = j.at("size_normalized").get<double>();
    r.size_physical = j.at("size_physical").get<double>();
    r.size_unit = j.at("size_unit").get<std::string>();
    r.vertices = j.at("vertices").get<std::vector<std::vector<double>>>();
    r.iterations = j.at("iterations").get<int>();
    r.max_iterations = j.at("max_iterations").get<bool>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (!j.at("stats").is_null()) r.stats = KpiStats::from_json(j["stats"]);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("aor report: ") + e.what());
  }
  return r;
}

namespace {

bool vertices_inside(const geometry::AlphaShape& shape, const std::vector<double>& center, double h) {
  const std::size_t d = center.size();
  std::vector<double> v(d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    for (std::size_t i = 0; i < d; ++i) v[i] = center[i] + ((mask >> i) & 1u ? h : -h);
    if (!shape.contains(v)) return false;
  }
  return true;
}

}  // namespace

AorReport find_aor(const dsid::DesignSpaceResult& space, std::span<const double> nop, const AorOptions& options) {
  const auto& shape = space.shape;
  const auto& norm = shape.normalization();
  const std::size_t d = shape.dim();
  if (nop.size() != d) throw DimensionMismatch("NOP has " + std::to_string(nop.size()) + " values, space has " + std::to_string(d));
  if (!(options.tol > 0.0) || options.iter_max < 1) throw InvalidArgument("AOR tolerance and iter_max must be positive");

  AorReport r;
  r.nop.assign(nop.begin(), nop.end());
  r.nop_unit = norm.to_unit(nop);
  if (shape.empty() || !shape.contains(r.nop_unit)) {
    std::string s;
    for (std::size_t i = 0; i < d; ++i) s += (i ? ", " : "") + std::to_string(nop[i]);
    throw NopOutsideSpace("NOP (" + s + ") lies outside the design space");
  }

  double lo = 0.0, hi = 1.0;
  while (hi - lo > options.tol) {
    if (r.iterations >= options.iter_max) {
      r.max_iterations = true;
      r.warnings.push_back("bisection stopped at iter_max = " + std::to_string(options.iter_max));
      break;
    }
    const double mid = 0.5 * (lo + hi);
    if (vertices_inside(shape, r.nop_unit, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++r.iterations;
  }
  r.half_width = lo;
  r.bracket_upper = hi;

  double scale = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double w = norm.width(i);
    scale *= w;
    r.half_range.push_back(lo * w);
    r.mpar_lower.push_back(nop[i] - lo * w);
    r.mpar_upper.push_back(nop[i] + lo * w);
  }
  r.size_normalized = std::pow(2.0 * lo, static_cast<double>(d));
  r.size_physical = r.size_normalized * scale;
  r.size_unit = space.size_unit;
  std::vector<double> v(d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    for (std::size_t i = 0; i < d; ++i) v[i] = (mask >> i) & 1u ? r.mpar_upper[i] : r.mpar_lower[i];
    r.vertices.push_back(v);
  }
  return r;
}

MparRanges mpar(const AorReport& report) { return {report.mpar_lower, report.mpar_upper}; }

// ---- NOP comparison ------------------------------------------------------------

double percent_change(double from, double to) {
  if (from == 0.0) return to == 0.0 ? 0.0 : kNaN;
  return (to - from) / std::abs(from) * 100.0;
}

nlohmann::json NopComparison::to_json() const {
  nlohmann::json mp = nlohmann::json::array(), kp = nlohmann::json::array();
  for (double v : mpar_delta_pct) mp.push_back(number_or_null(v));
  for (double v : kpi_mean_delta_pct) kp.push_back(number_or_null(v));
  return {{"schema_version", 1},
          {"a", a.to_json()},
          {"b", b.to_json()},
          {"aor_size_delta_pct", number_or_null(aor_size_delta_pct)},
          {"mpar_delta_pct", mp},
          {"kpi_names", kpi_names},
          {"kpi_mean_delta_pct", kp}};
}

NopComparison compare_nops(const dsid::DesignSpaceResult& space, std::span<const double> nop_a,
                           std::span<const double> nop_b, const dsid::LabeledCloud& cloud,
                           const surrogate::Interpolator* interpolator, const AorOptions& options,
                           unsigned support_power) {
  NopComparison c;
  c.a = find_aor(space, nop_a, options);
  c.b = find_aor(space, nop_b, options);
  c.a.decision_names = c.b.decision_names = cloud.decision_names;
  for (auto* r : {&c.a, &c.b}) {
    try {
      r->stats = kpi_stats(r->region(), cloud, interpolator, support_power);
    } catch (const EmptyRegion&) {
      r->warnings.push_back("no samples inside the AOR; KPI statistics omitted");
    }
  }
  c.aor_size_delta_pct = percent_change(c.a.size_physical, c.b.size_physical);
  for (std::size_t i = 0; i < c.a.half_range.size(); ++i) {
    c.mpar_delta_pct.push_back(percent_change(c.a.half_range[i], c.b.half_range[i]));
  }
  if (c.a.stats && c.b.stats) {
    for (const auto& k : c.a.stats->kpis) {
      c.kpi_names.push_back(k.name);
      c.kpi_mean_delta_pct.push_back(percent_change(k.mean, c.b.stats->at(k.name).mean));
    }
  }
  return c;
}

// ---- text output ---------------------------------------------------------------

namespace {

std::string name_of(const AorReport& r, std::size_t i) {
  return i < r.decision_names.size() ? r.decision_names[i] : "x" + std::to_string(i + 1);
}

void write_pct(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "n/a";
  } else {
    const auto prec = out.precision(3);
    out << std::showpos << v << std::noshowpos << '%';
    out.precision(prec);
  }
}

}  // namespace

void write_text(std::ostream& out, const AorReport& r) {
  const auto flags = out.flags();
  out << std::setprecision(6);
  out << "AOR normalized half-width  " << r.half_width << (r.max_iterations ? "  (iteration cap hit)" : "") << '\n';
  out << std::left << std::setw(14) << "decision" << std::setw(12) << "NOP" << std::setw(14) << "MPAR +/-"
      << "range\n";
  for (std::size_t i = 0; i < r.nop.size(); ++i) {
    out << std::setw(14) << name_of(r, i) << std::setw(12) << r.nop[i] << std::setw(14) << r.half_range[i] << '['
        << r.mpar_lower[i] << ", " << r.mpar_upper[i] << "]\n";
  }
  out << "AOR size  " << r.size_physical << ' ' << r.size_unit << '\n';
  if (r.stats) {
    out << "KPIs in AOR (" << r.stats->n_truth << " samples, " << r.stats->n_samples() << " with support)\n";
    for (const auto& k : r.stats->kpis) {
      out << "  " << std::setw(14) << k.name << "min " << k.min << "  avg " << k.mean << "  max " << k.max << '\n';
    }
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  out.flags(flags);
}

void write_text(std::ostream& out, const NopComparison& c) {
  const auto flags = out.flags();
  out << std::setprecision(6) << std::left;
  out << std::setw(22) << "" << std::setw(14) << "NOP A" << std::setw(14) << "NOP B" << "change\n";
  for (std::size_t i = 0; i < c.a.nop.size(); ++i) {
    out << std::setw(22) << (name_of(c.a, i) + " NOP") << std::setw(14) << c.a.nop[i] << std::setw(14) << c.b.nop[i]
        << '\n';
  }
  for (std::size_t i = 0; i < c.a.nop.size(); ++i) {
    out << std::setw(22) << (name_of(c.a, i) + " MPAR +/-") << std::setw(14) << c.a.half_range[i] << std::setw(14)
        << c.b.half_range[i];
    write_pct(out, c.mpar_delta_pct[i]);
    out << '\n';
  }
  out << std::setw(22) << ("AOR size (" + c.a.size_unit + ")") << std::setw(14) << c.a.size_physical << std::setw(14)
      << c.b.size_physical;
  write_pct(out, c.aor_size_delta_pct);
  out << '\n';
  for (std::size_t k = 0; k < c.kpi_names.size(); ++k) {
    out << std::setw(22) << ("avg " + c.kpi_names[k]) << std::setw(14) << c.a.stats->kpis[k].mean << std::setw(14)
        << c.b.stats->at(c.kpi_names[k]).mean;
    write_pct(out, c.kpi_mean_delta_pct[k]);
    out << '\n';
  }
  out.flags(flags);
}

}  // namespace dspace::analysis
