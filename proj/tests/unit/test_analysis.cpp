#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dspace/analysis/aor.hpp"
#include "dspace/dsid/identify.hpp"
#include "dspace/dsid/model.hpp"
#include "dspace/error.hpp"
#include "dspace/sampling/sobol.hpp"
#include "oracles/dsid_oracle.hpp"

using namespace dspace;
using namespace dspace::analysis;
using geometry::PointCloud;

namespace {

// Space whose shape is the hull of the unit cube corners, scaled to `bounds`.
dsid::DesignSpaceResult cube_space(const sampling::Bounds& bounds) {
  PointCloud corners(3);
  for (int m = 0; m < 8; ++m) corners.push_back({double(m & 1), double((m >> 1) & 1), double((m >> 2) & 1)});
  dsid::DesignSpaceResult s;
  s.shape = geometry::convex_hull(corners);
  s.shape.set_normalization(bounds.normalization());
  s.size_unit = "u";
  return s;
}

const sampling::Bounds kBox{{"c", "q", "t"}, {0.0, 10.0, 40.0}, {2.0, 30.0, 120.0}};

struct Benchmark {
  dsid::DesignProblem problem = dsid::BenchmarkModel::standard_problem(3, 12);
  std::unique_ptr<dsid::ProcessModel> model = dsid::make_model(problem);
  dsid::LabeledCloud cloud;
  dsid::DesignSpaceResult space;

  Benchmark() {
    const auto x = sampling::sobol(3, problem.bounds, 12).inputs;
    cloud = dsid::classify(x, dsid::evaluate_batch(*model, x).kpis, model->kpi_names(), problem);
    space = dsid::identify_tolerance(cloud, problem);
  }
  surrogate::FunctionInterpolator exact() const {
    return surrogate::FunctionInterpolator([m = model.get()](std::span<const double> x) { return m->evaluate(x); },
                                           2);
  }
};

const Benchmark& benchmark() {
  static const Benchmark b;
  return b;
}

bool all_vertices_inside(const geometry::AlphaShape& s, const AorReport& r, double h) {
  const std::size_t d = r.nop_unit.size();
  std::vector<double> v(d);
  for (unsigned m = 0; m < (1u << d); ++m) {
    for (std::size_t i = 0; i < d; ++i) v[i] = r.nop_unit[i] + ((m >> i) & 1u ? h : -h);
    if (!oracle::shape_contains(s, v)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("AOR in a full cube") {
  const auto space = cube_space(kBox);
  const std::vector<double> center = {1.0, 20.0, 80.0};
  const auto r = find_aor(space, center);
  CHECK(std::abs(r.half_width - 0.5) <= 1e-3);
  CHECK_FALSE(r.max_iterations);
  CHECK(r.half_range[0] == doctest::Approx(r.half_width * 2.0));
  CHECK(r.half_range[1] == doctest::Approx(r.half_width * 20.0));
  CHECK(r.half_range[2] == doctest::Approx(r.half_width * 80.0));
  // each MPAR spans about half of each bound width
  const auto m = mpar(r);
  CHECK(m.upper[0] - m.lower[0] == doctest::Approx(2.0).epsilon(2e-3));
  CHECK(m.upper[2] - m.lower[2] == doctest::Approx(80.0).epsilon(2e-3));
  CHECK(r.size_normalized == doctest::Approx(std::pow(2 * r.half_width, 3)));
  CHECK(r.size_physical == doctest::Approx(r.size_normalized * 2.0 * 20.0 * 80.0));
  CHECK(r.vertices.size() == 8);

  // boundary NOP: no expansion is possible
  const std::vector<double> corner = {0.0, 10.0, 40.0};
  const auto b = find_aor(space, corner);
  CHECK(b.half_width == 0.0);
  CHECK(mpar(b).lower == b.nop);
  CHECK(mpar(b).upper == b.nop);
  const std::vector<double> face = {1.0, 10.0, 80.0};
  CHECK(find_aor(space, face).half_width <= 1e-3);

  const std::vector<double> outside = {2.5, 20.0, 80.0};
  CHECK_THROWS_AS(find_aor(space, outside), NopOutsideSpace);
  CHECK_THROWS_AS(find_aor(space, std::vector<double>{1.0, 20.0}), DimensionMismatch);

  AorOptions few;
  few.iter_max = 2;
  CHECK(find_aor(space, center, few).max_iterations);
}

TEST_CASE("AOR contract on random NOPs in the benchmark space") {
  const auto& bm = benchmark();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  int tested = 0;
  while (tested < 20) {
    std::vector<double> nop = {u(rng), u(rng), u(rng)};
    if (!bm.space.shape.contains(nop)) {
      CHECK_THROWS_AS(find_aor(bm.space, nop), NopOutsideSpace);
      continue;
    }
    const auto r = find_aor(bm.space, nop);
    CHECK(all_vertices_inside(bm.space.shape, r, r.half_width));
    CHECK_FALSE(all_vertices_inside(bm.space.shape, r, r.half_width + 2e-3));
    ++tested;
  }

  // centre: analytic inscribed cube of the ball is r / sqrt(3); the hull of
  // the samples is smaller, so the AOR can only come out below it
  const std::vector<double> c = {0.5, 0.5, 0.5};
  const auto r = find_aor(bm.space, c);
  MESSAGE("centre half-width " << r.half_width << " vs analytic " << 0.35 / std::sqrt(3.0));
  CHECK(r.half_width < 0.35 / std::sqrt(3.0));
  CHECK(r.half_width > 0.8 * 0.35 / std::sqrt(3.0));
}

TEST_CASE("KPI statistics") {
  const auto& bm = benchmark();

  SUBCASE("constant KPI") {
    auto x = sampling::sobol(2, {{"a", "b"}, {0, 0}, {1, 1}}, 6).inputs;
    PointCloud k(1);
    for (std::size_t i = 0; i < x.size(); ++i) k.push_back({7.5});
    dsid::DesignProblem p;
    p.bounds = {{"a", "b"}, {0, 0}, {1, 1}};
    p.units = {"", ""};
    const auto cloud = dsid::classify(x, k, {"g"}, p);
    const auto s = kpi_stats(Region::box({0.2, 0.2}, {0.6, 0.6}), cloud);
    CHECK(s.kpis[0].min == 7.5);
    CHECK(s.kpis[0].mean == 7.5);
    CHECK(s.kpis[0].max == 7.5);
    CHECK(s.kpis[0].bin_counts[0] == s.n_truth);
    CHECK_THROWS_AS(kpi_stats(Region::box({0.2, 0.2}, {0.2, 0.2}), cloud), EmptyRegion);
  }

  SUBCASE("benchmark space against a dense grid") {
    const auto region = Region::space(bm.space.shape);
    const auto s = kpi_stats(region, bm.cloud);
    CHECK(s.n_truth == bm.cloud.n_sat());  // zero-tolerance space holds exactly P_sat
    CHECK(s.at("quality").min >= bm.problem.constraints[0].threshold);

    // grid oracle: 100^3 cell centres inside the analytic ball
    const int n = 100;
    double qmin = 1e300, qmax = -1e300, qsum = 0, tmin = 1e300, tmax = -1e300, tsum = 0;
    std::size_t cnt = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double x = (i + 0.5) / n - 0.5, y = (j + 0.5) / n - 0.5, z = (k + 0.5) / n - 0.5;
          const double r2 = x * x + y * y + z * z;
          if (r2 > 0.35 * 0.35) continue;
          const double q = 100 - 50 * r2, t = 1 + (x + 0.5) + 0.5 * (y + 0.5) * (z + 0.5);
          qmin = std::min(qmin, q), qmax = std::max(qmax, q), qsum += q;
          tmin = std::min(tmin, t), tmax = std::max(tmax, t), tsum += t;
          ++cnt;
        }
    const auto& q = s.at("quality");
    const auto& t = s.at("throughput");
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    CHECK(rel(q.min, qmin) < 0.02);
    CHECK(rel(q.max, qmax) < 0.02);
    CHECK(rel(q.mean, qsum / cnt) < 0.02);
    CHECK(rel(t.mean, tsum / cnt) < 0.02);

    const auto interp = bm.exact();
    const auto dense = kpi_stats(region, bm.cloud, &interp, 14);
    CHECK(dense.n_support > 0);
    CHECK(rel(dense.at("throughput").mean, tsum / cnt) < 0.02);
    CHECK(rel(dense.at("throughput").max, tmax) < 0.02);
    CHECK(rel(dense.at("throughput").min, tmin) < 0.02);
    std::size_t binned = 0;
    for (auto c : dense.at("quality").bin_counts) binned += c;
    CHECK(binned == dense.n_samples());
    CHECK(dense.at("quality").bin_edges.size() == kHistogramBins + 1);
  }
}

TEST_CASE("NOP comparison") {
  const auto& bm = benchmark();
  const auto interp = bm.exact();
  const std::vector<double> a = {0.5, 0.5, 0.5};
  const auto same = compare_nops(bm.space, a, a, bm.cloud, &interp);
  CHECK(same.aor_size_delta_pct == 0.0);
  for (double d : same.mpar_delta_pct) CHECK(d == 0.0);
  for (double d : same.kpi_mean_delta_pct) CHECK(d == 0.0);

  const std::vector<double> b = {0.6, 0.45, 0.55};
  const auto cmp = compare_nops(bm.space, a, b, bm.cloud, &interp);
  CHECK(cmp.mpar_delta_pct[0] == doctest::Approx(cmp.mpar_delta_pct[1]));
  CHECK(cmp.mpar_delta_pct[1] == doctest::Approx(cmp.mpar_delta_pct[2]));
  CHECK(cmp.aor_size_delta_pct < 0.0);
  REQUIRE(cmp.kpi_names.size() == 2);
  // throughput rises with x1, so the shifted AOR averages higher
  CHECK(cmp.kpi_mean_delta_pct[1] > 0.0);

  std::ostringstream text;
  write_text(text, cmp);
  CHECK(text.str().find("AOR size") != std::string::npos);
  CHECK(text.str().find("avg throughput") != std::string::npos);

  CHECK(percent_change(0.0, 0.0) == 0.0);
  CHECK(std::isnan(percent_change(0.0, 1.0)));
  CHECK(percent_change(4.0, 3.0) == doctest::Approx(-25.0));
}

TEST_CASE("AOR report JSON round trip") {
  const auto& bm = benchmark();
  const auto interp = bm.exact();
  auto r = find_aor(bm.space, std::vector<double>{0.5, 0.5, 0.5});
  r.decision_names = bm.problem.names();
  r.stats = kpi_stats(r.region(), bm.cloud, &interp, 10);
  const auto j = r.to_json();
  CHECK(AorReport::from_json(j).to_json() == j);
  std::ostringstream text;
  write_text(text, r);
  CHECK(text.str().find("x2") != std::string::npos);
  auto bad = j;
  bad.erase("mpar_lower");
  CHECK_THROWS_AS(AorReport::from_json(bad), ConfigError);
}
