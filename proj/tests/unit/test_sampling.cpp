#include <doctest.h>

#include <random>
#include <sstream>

#include "dspace/error.hpp"
#include "dspace/sampling/sobol.hpp"
#include "dspace/util/csv.hpp"

using namespace dspace;
using namespace dspace::sampling;

namespace {

Bounds unit_bounds(std::size_t d, double hi = 1.0) {
  Bounds b;
  for (std::size_t i = 0; i < d; ++i) {
    b.names.push_back("x" + std::to_string(i + 1));
    b.lower.push_back(0.0);
    b.upper.push_back(hi);
  }
  return b;
}

// Largest local discrepancy over random anchored boxes [0, t).
double discrepancy_estimate(const geometry::PointCloud& pts, int boxes, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  const std::size_t d = pts.dim();
  std::vector<double> t(d);
  for (int b = 0; b < boxes; ++b) {
    double vol = 1.0;
    for (auto& x : t) {
      x = u(rng);
      vol *= x;
    }
    std::size_t in = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      bool inside = true;
      for (std::size_t k = 0; k < d && inside; ++k) inside = pts[i][k] < t[k];
      in += inside;
    }
    worst = std::max(worst, std::abs(static_cast<double>(in) / pts.size() - vol));
  }
  return worst;
}

}  // namespace

TEST_CASE("first Sobol points match the reference generator") {
  // Reference values from an independent 30-bit unscrambled generator.
  const double expected[16][3] = {
      {0.0, 0.0, 0.0},          {0.5, 0.5, 0.5},          {0.75, 0.25, 0.25},
      {0.25, 0.75, 0.75},       {0.375, 0.375, 0.625},    {0.875, 0.875, 0.125},
      {0.625, 0.125, 0.875},    {0.125, 0.625, 0.375},    {0.1875, 0.3125, 0.9375},
      {0.6875, 0.8125, 0.4375}, {0.9375, 0.0625, 0.6875}, {0.4375, 0.5625, 0.1875},
      {0.3125, 0.1875, 0.3125}, {0.8125, 0.6875, 0.8125}, {0.5625, 0.4375, 0.0625},
      {0.0625, 0.9375, 0.5625}};
  const SobolSequence seq(3);
  double p[3];
  for (int i = 0; i < 16; ++i) {
    seq.point(i, p);
    for (int k = 0; k < 3; ++k) CHECK(p[k] == expected[i][k]);
  }
}

TEST_CASE("higher dimensions and far indices match the reference generator") {
  const SobolSequence seq(12);
  std::vector<double> p(12);
  const double at1000[12] = {0.2197265625, 0.0966796875, 0.5185546875, 0.6767578125,
                             0.2802734375, 0.9072265625, 0.0458984375, 0.8994140625,
                             0.5009765625, 0.0693359375, 0.0849609375, 0.2548828125};
  const double at777[12] = {0.6923828125, 0.9365234375, 0.1630859375, 0.2744140625,
                            0.6357421875, 0.3564453125, 0.1904296875, 0.7626953125,
                            0.3486328125, 0.3232421875, 0.7451171875, 0.6962890625};
  seq.point(1000, p.data());
  for (int k = 0; k < 12; ++k) CHECK(p[k] == at1000[k]);
  seq.point(777, p.data());
  for (int k = 0; k < 12; ++k) CHECK(p[k] == at777[k]);

  const SobolSequence wide(32);
  std::vector<double> q(32);
  wide.point(1048576 + 12345, q.data());
  CHECK(q[31] == 0.5914130210876465);
  CHECK(q[20] == 0.16087102890014648);
  CHECK(q[5] == 0.9241480827331543);
}

TEST_CASE("batch size, containment and scaling") {
  const auto b = sobol(3, unit_bounds(3), 3);
  CHECK(b.inputs.size() == 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (double x : b.inputs[i]) CHECK((x >= 0.0 && x <= 1.0));
  const auto b2 = sobol(3, unit_bounds(3, 2.0), 3);
  for (std::size_t i = 0; i < 8; ++i)
    for (int k = 0; k < 3; ++k) CHECK(b2.inputs[i][k] == 2.0 * b.inputs[i][k]);
}

TEST_CASE("determinism and nesting") {
  const auto a = sobol(3, unit_bounds(3), 10);
  const auto b = sobol(3, unit_bounds(3), 10);
  CHECK(a.inputs.coords() == b.inputs.coords());
  const auto big = sobol(3, unit_bounds(3), 11);
  CHECK(std::equal(a.inputs.coords().begin(), a.inputs.coords().end(), big.inputs.coords().begin()));
  const auto sa = sobol(2, unit_bounds(2), 6, true);
  const auto sb = sobol(2, unit_bounds(2), 7, true);
  CHECK(std::equal(sa.inputs.coords().begin(), sa.inputs.coords().end(), sb.inputs.coords().begin()));
}

TEST_CASE("skip convention") {
  const auto with_zero = sobol(3, unit_bounds(3), 4);
  CHECK(with_zero.inputs[0][0] == 0.0);
  CHECK(with_zero.first_index == 0);
  const auto skipped = sobol(3, unit_bounds(3), 4, true);
  CHECK(skipped.first_index == 1);
  CHECK(skipped.inputs[0][0] == 0.5);
  CHECK(skipped.inputs.size() == 16);
}

TEST_CASE("Sobol beats pseudorandom on discrepancy") {
  const auto qmc = sobol(3, unit_bounds(3), 12).inputs;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  geometry::PointCloud prn(3);
  for (std::size_t i = 0; i < qmc.size(); ++i) prn.push_back({u(rng), u(rng), u(rng)});
  CHECK(discrepancy_estimate(qmc, 1000, 7) < discrepancy_estimate(prn, 1000, 7));
}

TEST_CASE("invalid bounds are rejected") {
  Bounds b = unit_bounds(3);
  b.upper[1] = 0.0;
  CHECK_THROWS_AS(sobol(3, b, 3), InvalidBounds);
  b = unit_bounds(3);
  b.lower[0] = std::nan("");
  CHECK_THROWS_AS(b.validate(), InvalidBounds);
  CHECK_THROWS_AS(sobol(2, unit_bounds(3), 3), InvalidBounds);
  CHECK_THROWS_AS(sobol(3, unit_bounds(3), 0), InvalidBounds);
  CHECK_THROWS_AS(SobolSequence(0), InvalidBounds);
  CHECK_THROWS_AS(SobolSequence(SobolSequence::max_dim() + 1), InvalidBounds);
}

TEST_CASE("CSV export has a header and one row per sample") {
  Bounds b = unit_bounds(3);
  b.names = {"c_feed", "Q_feed", "T_switch"};
  const auto batch = sobol(3, b, 4);
  std::stringstream ss;
  write_csv(ss, batch);
  const auto t = util::read_csv(ss);
  CHECK(t.header == std::vector<std::string>{"c_feed", "Q_feed", "T_switch"});
  CHECK(t.rows.size() == 16);
  const auto col = t.numeric_column("Q_feed");
  for (std::size_t i = 0; i < 16; ++i) CHECK(col[i] == batch.inputs[i][1]);
}

TEST_CASE("bounds JSON round trip") {
  Bounds b;
  b.names = {"a", "b"};
  b.lower = {0.2, 0.5};
  b.upper = {0.77, 1.5};
  const auto r = Bounds::from_json(b.to_json());
  CHECK(r.names == b.names);
  CHECK(r.lower == b.lower);
  CHECK(r.upper == b.upper);
}
