#include <doctest.h>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "dspace/error.hpp"
#include "dspace/geometry/alpha_shape.hpp"
#include "dspace/geometry/predicates.hpp"
#include "dspace/geometry/triangulation.hpp"
#include "oracles/geometry_oracle.hpp"

using namespace dspace;
using namespace dspace::geometry;

namespace {

PointCloud random_cloud(std::size_t n, std::size_t dim, unsigned seed, double lo = 0.0,
                        double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  PointCloud c(dim);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : p) x = u(rng);
    c.push_back(p);
  }
  return c;
}

std::vector<oracle::Pt> rows(const PointCloud& c) {
  std::vector<oracle::Pt> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.emplace_back(c[i].begin(), c[i].end());
  return out;
}

double total_volume(const Triangulation& t) {
  double v = 0.0;
  for (double x : t.volumes) v += x;
  return v;
}

// Every simplex's circumsphere must be empty of the other input points.
void check_delaunay(const Triangulation& t, double tol) {
  const auto pts = rows(t.points);
  std::vector<bool> dup(pts.size(), false);
  for (auto d : t.duplicates) dup[d] = true;
  for (std::size_t s = 0; s < t.size(); ++s) {
    std::vector<oracle::Pt> v;
    for (int id : t.simplex(s)) v.push_back(pts[id]);
    oracle::Pt c;
    double r = 0.0;
    REQUIRE(oracle::circumsphere(v, c, r));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (dup[i]) continue;
      const auto sx = t.simplex(s);
      if (std::find(sx.begin(), sx.end(), static_cast<int>(i)) != sx.end()) continue;
      CHECK(oracle::dist(c, pts[i]) >= r - tol);
    }
  }
}

void check_adjacency(const Triangulation& t) {
  const std::size_t k = t.dim() + 1;
  for (std::size_t s = 0; s < t.size(); ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      const int nb = t.adjacent(s)[i];
      if (nb < 0) continue;
      const auto back = t.adjacent(static_cast<std::size_t>(nb));
      CHECK(std::count(back.begin(), back.end(), static_cast<int>(s)) == 1);
    }
  }
}

std::set<std::vector<int>> facet_set(const AlphaShape& s) {
  std::set<std::vector<int>> out;
  const auto& f = s.boundary_facets();
  for (std::size_t i = 0; i < s.boundary_facet_count(); ++i) {
    std::vector<int> v(f.begin() + i * s.dim(), f.begin() + (i + 1) * s.dim());
    std::sort(v.begin(), v.end());
    out.insert(v);
  }
  return out;
}

int exact_orient2d(const double* a, const double* b, const double* c) {
  const mpq_class ux = mpq_class(b[0]) - a[0], uy = mpq_class(b[1]) - a[1];
  const mpq_class vx = mpq_class(c[0]) - a[0], vy = mpq_class(c[1]) - a[1];
  return sgn(mpq_class(ux * vy - uy * vx));
}

int exact_incircle(const double* a, const double* b, const double* c, const double* p) {
  const double* q[3] = {a, b, c};
  mpq_class m[3][3];
  for (int r = 0; r < 3; ++r) {
    m[r][0] = mpq_class(q[r][0]) - p[0];
    m[r][1] = mpq_class(q[r][1]) - p[1];
    m[r][2] = m[r][0] * m[r][0] + m[r][1] * m[r][1];
  }
  const mpq_class det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                        m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                        m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return sgn(det);
}

}  // namespace

TEST_CASE("circumradius of right triangle and unit tetrahedron") {
  CHECK(circumradius(PointCloud::from_rows({{0, 0}, {3, 0}, {0, 4}})) == doctest::Approx(2.5));
  CHECK(circumradius(PointCloud::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}})) ==
        doctest::Approx(std::sqrt(3.0) / 2.0));
  const auto c = circumcenter(PointCloud::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  for (double x : c) CHECK(x == doctest::Approx(0.5));
  CHECK_THROWS_AS(circumradius(PointCloud::from_rows({{0, 0}, {1, 1}, {2, 2}})), DegenerateSimplex);
}

TEST_CASE("circumcentre is equidistant from all vertices") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cloud = random_cloud(4, 3, 100 + trial);
    const auto c = circumcenter(cloud);
    const double r = circumradius(cloud);
    for (std::size_t i = 0; i < 4; ++i) {
      double d = 0.0;
      for (int k = 0; k < 3; ++k) d += (c[k] - cloud[i][k]) * (c[k] - cloud[i][k]);
      CHECK(std::abs(std::sqrt(d) - r) <= 1e-9 * r);
    }
  }
}

TEST_CASE("orient2d agrees with rational arithmetic near degeneracy") {
  const double b[2] = {12.0, 12.0}, c[2] = {24.0, 24.0};
  int mismatches = 0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const double a[2] = {0.5 + i * std::ldexp(1.0, -53), 0.5 + j * std::ldexp(1.0, -53)};
      if (predicates::orient2d(a, b, c) != exact_orient2d(a, b, c)) ++mismatches;
    }
  CHECK(mismatches == 0);
}

TEST_CASE("incircle agrees with rational arithmetic on perturbed cocircular points") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> ulp(-3, 3);
  int mismatches = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    // Four points of a circle, snapped to doubles and nudged by a few ulps.
    double q[4][2];
    for (int i = 0; i < 4; ++i) {
      const double t = 0.7 * i + 0.1 * trial;
      for (int k = 0; k < 2; ++k) {
        double v = k == 0 ? 0.5 + 0.3 * std::cos(t) : 0.5 + 0.3 * std::sin(t);
        for (int s = ulp(rng); s != 0; s += s > 0 ? -1 : 1)
          v = std::nextafter(v, s > 0 ? 2.0 : -2.0);
        q[i][k] = v;
      }
    }
    if (exact_orient2d(q[0], q[1], q[2]) <= 0) std::swap(q[0], q[1]);
    if (exact_orient2d(q[0], q[1], q[2]) <= 0) continue;
    const double* tri[3] = {q[0], q[1], q[2]};
    if (predicates::insphere(2, tri, q[3]) != exact_incircle(q[0], q[1], q[2], q[3])) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("symbolic perturbation never reports cocircular") {
  const double a[2] = {0, 0}, b[2] = {1, 0}, c[2] = {1, 1}, d[2] = {0, 1};
  const double* tri[3] = {a, b, c};
  const std::size_t ids[3] = {0, 1, 2};
  CHECK(predicates::insphere(2, tri, d) == 0);
  CHECK(predicates::insphere_sos(2, tri, ids, d, 3) != 0);
}

TEST_CASE("delaunay of the unit square and a single tetrahedron") {
  const auto sq = delaunay(PointCloud::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  CHECK(sq.size() == 2);
  CHECK(total_volume(sq) == doctest::Approx(1.0));
  const auto tet = delaunay(PointCloud::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  CHECK(tet.size() == 1);
  CHECK(tet.volumes[0] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("delaunay rejects degenerate and mismatched input") {
  CHECK_THROWS_AS(delaunay(PointCloud::from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}})), DegenerateInput);
  CHECK_THROWS_AS(delaunay(PointCloud::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}})),
                  DegenerateInput);
  CHECK_THROWS_AS(delaunay(PointCloud::from_rows({{0, 0}, {1, 0}})), DegenerateInput);
  CHECK_THROWS_AS(delaunay(PointCloud::from_rows({{0.0}, {1.0}})), DimensionMismatch);
  CHECK_THROWS_AS(PointCloud::from_rows({{0, 0}, {1, 0, 0}}), DimensionMismatch);
}

TEST_CASE("random clouds satisfy the empty circumsphere property") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto t3 = delaunay(random_cloud(50, 3, seed));
    check_delaunay(t3, 1e-7);
    check_adjacency(t3);
    const auto t2 = delaunay(random_cloud(200, 2, seed));
    check_delaunay(t2, 1e-7);
    check_adjacency(t2);
  }
}

TEST_CASE("cospherical lattices triangulate consistently") {
  PointCloud grid3(3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k) grid3.push_back({i / 4.0, j / 4.0, k / 4.0});
  const auto t3 = delaunay(grid3);
  CHECK(total_volume(t3) == doctest::Approx(1.0).epsilon(1e-12));
  check_delaunay(t3, 1e-9);
  check_adjacency(t3);
  for (double v : t3.volumes) CHECK(v > 0.0);

  PointCloud grid2(2);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) grid2.push_back({i / 19.0, j / 19.0});
  const auto t2 = delaunay(grid2);
  CHECK(t2.size() == 2 * 19 * 19);
  CHECK(total_volume(t2) == doctest::Approx(1.0).epsilon(1e-12));
  check_adjacency(t2);
}

TEST_CASE("duplicate points are dropped and reported") {
  auto c = PointCloud::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 0}});
  const auto t = delaunay(c);
  CHECK(t.duplicates == std::vector<std::size_t>{3, 5});
  CHECK(total_volume(t) == doctest::Approx(1.0));
}

TEST_CASE("every input point appears in some simplex") {
  const auto c = random_cloud(500, 3, 17);
  const auto t = delaunay(c);
  std::vector<bool> seen(c.size(), false);
  for (int id : t.simplices) seen[id] = true;
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST_CASE("convex hull basics") {
  const auto sq = convex_hull(PointCloud::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}));
  CHECK(sq.boundary_vertices() == std::vector<int>{0, 1, 2, 3});
  CHECK(sq.measure() == doctest::Approx(1.0));
  CHECK(std::isinf(sq.alpha_radius()));
  const auto tet = convex_hull(PointCloud::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  CHECK(tet.measure() == doctest::Approx(1.0 / 6.0));
  CHECK(count_regions(tet) == 1);
}

TEST_CASE("convex hull volume matches exhaustive facet enumeration") {
  const auto c = random_cloud(200, 3, 42);
  const double expected = oracle::hull_volume_3d(rows(c));
  CHECK(convex_hull(c).measure() == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("boundary facets face outward") {
  const auto c = random_cloud(150, 3, 5);
  const auto hull = convex_hull(c);
  const auto& f = hull.boundary_facets();
  std::vector<double> centroid(3, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int k = 0; k < 3; ++k) centroid[k] += c[i][k] / c.size();
  for (std::size_t i = 0; i < hull.boundary_facet_count(); ++i) {
    const double* p[4] = {centroid.data(), c[f[3 * i]].data(), c[f[3 * i + 1]].data(),
                          c[f[3 * i + 2]].data()};
    CHECK(predicates::orient(3, p) > 0);
  }
}

TEST_CASE("large alpha reproduces the convex hull") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto c = random_cloud(300, 3, 500 + seed);
    const auto tri = delaunay(c);
    const auto big = alpha_shape(tri, tri.max_circumradius());
    const auto hull = convex_hull(c);
    CHECK(facet_set(big) == facet_set(hull));
    CHECK(std::abs(big.measure() - hull.measure()) <= 1e-12);
  }
}

TEST_CASE("tiny alpha leaves nothing") {
  const auto tri = delaunay(random_cloud(100, 2, 8));
  const double rmin = *std::min_element(tri.circumradii.begin(), tri.circumradii.end());
  CHECK_THROWS_AS(alpha_shape(tri, 0.5 * rmin), EmptyShape);
  CHECK_THROWS_AS(alpha_shape(tri, 0.0), InvalidArgument);
}

TEST_CASE("alpha shape invariants: parity, monotonicity, measure ordering") {
  const auto tri = delaunay(random_cloud(400, 3, 77));
  const double hull = alpha_shape(tri, std::numeric_limits<double>::infinity()).measure();
  double prev = 0.0;
  std::set<std::vector<int>> prev_set;
  for (double a : {0.08, 0.1, 0.15, 0.25, 0.5}) {
    const auto s = alpha_shape(tri, a);
    for (double r : s.circumradii()) CHECK(r <= a);
    std::map<std::vector<int>, int> incidence;
    std::set<std::vector<int>> simplices;
    for (std::size_t t = 0; t < s.size(); ++t) {
      std::vector<int> v(s.simplex(t).begin(), s.simplex(t).end());
      for (std::size_t i = 0; i < v.size(); ++i) {
        std::vector<int> f;
        for (std::size_t j = 0; j < v.size(); ++j)
          if (j != i) f.push_back(v[j]);
        std::sort(f.begin(), f.end());
        ++incidence[f];
      }
      std::sort(v.begin(), v.end());
      simplices.insert(v);
    }
    std::size_t once = 0;
    for (const auto& [f, n] : incidence) {
      CHECK((n == 1 || n == 2));
      once += n == 1;
    }
    CHECK(once == s.boundary_facet_count());
    CHECK(std::includes(simplices.begin(), simplices.end(), prev_set.begin(), prev_set.end()));
    CHECK(s.measure() >= prev);
    CHECK(s.measure() <= hull + 1e-12);
    double regions = 0.0;
    for (double m : s.region_measures()) regions += m;
    CHECK(regions == doctest::Approx(s.measure()).epsilon(1e-12));
    prev = s.measure();
    prev_set = simplices;
  }
}

TEST_CASE("annulus keeps its hole") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c(2);
  while (c.size() < 2000) {
    const double x = 2 * u(rng) - 1, y = 2 * u(rng) - 1;
    const double r = std::hypot(x, y);
    if (r >= 0.5 && r <= 1.0) c.push_back({x, y});
  }
  const auto s = alpha_shape(c, 0.15);
  CHECK(count_regions(s) == 1);
  CHECK_FALSE(s.contains({0.0, 0.0}));
  const double target = 0.75 * std::numbers::pi;
  CHECK(std::abs(s.measure() - target) <= 0.05 * target);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double q[2] = {2 * u(rng) - 1, 2 * u(rng) - 1};
    hits += s.contains(q);
  }
  const double mc = 4.0 * hits / n;
  CHECK(std::abs(mc - s.measure()) <= 0.02 * target);
}

TEST_CASE("containment matches half-space test on a convex hull") {
  const auto c = random_cloud(60, 3, 31);
  const auto hull = convex_hull(c);
  const auto planes = oracle::hull_planes_3d(rows(c));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    const oracle::Pt q = {u(rng), u(rng), u(rng)};
    const bool in_oracle = oracle::inside_planes(planes, q, 0.0L);
    const bool near = oracle::inside_planes(planes, q, 1e-9L) != oracle::inside_planes(planes, q, -1e-9L);
    if (near) continue;
    disagreements += hull.contains(q) != in_oracle;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("containment edge cases") {
  const auto s = convex_hull(random_cloud(80, 3, 4));
  for (std::size_t t = 0; t < s.size(); ++t) {
    std::vector<double> g(3, 0.0);
    for (int id : s.simplex(t))
      for (int k = 0; k < 3; ++k) g[k] += s.points()[id][k] / 4.0;
    CHECK(s.contains(g));
    CHECK(s.region_labels()[s.locate(g)] >= 0);
  }
  CHECK_FALSE(s.contains({2.0, 2.0, 2.0}));
  for (int v : s.boundary_vertices()) CHECK(s.contains(s.points()[v]));
  CHECK_THROWS_AS(s.contains({0.5, 0.5}), DimensionMismatch);
}

TEST_CASE("region counting") {
  const auto one = alpha_shape(PointCloud::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), 10.0);
  CHECK(count_regions(one) == 1);

  // Two tetrahedra far apart: the bridging simplices have huge circumradii.
  const auto two = alpha_shape(PointCloud::from_rows({{0, 0, 0},
                                                      {1, 0, 0},
                                                      {0, 1, 0},
                                                      {0, 0, 1},
                                                      {10, 10, 10},
                                                      {11, 10, 10},
                                                      {10, 11, 10},
                                                      {10, 10, 11}}),
                               1.0);
  CHECK(count_regions(two) == 2);

  // Two clusters of 100 points separated by a gap wider than twice alpha.
  const double alpha = 0.08;
  auto c = random_cloud(100, 3, 61, 0.0, 0.3);
  const auto b = random_cloud(100, 3, 62, 0.0, 0.3);
  for (std::size_t i = 0; i < b.size(); ++i) c.push_back({b[i][0] + 0.3 + 2.5 * alpha, b[i][1], b[i][2]});
  const auto tri = delaunay(c);
  const auto s = alpha_shape(tri, alpha);
  CHECK(count_regions(s) == 2);
  CHECK(count_regions(alpha_shape(tri, std::numeric_limits<double>::infinity())) == 1);
  CHECK_THROWS_AS(count_regions(AlphaShape{}), EmptyShape);
}

TEST_CASE("measure of simple shapes") {
  PointCloud cube(3);
  for (int i = 0; i < 8; ++i) cube.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  CHECK(alpha_shape(cube, 100.0).measure() == doctest::Approx(1.0));
  CHECK(convex_hull(PointCloud::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}})).measure() ==
        doctest::Approx(1.0));
  CHECK(AlphaShape{}.measure() == 0.0);
}

TEST_CASE("JSON round trip preserves the shape") {
  const auto s = alpha_shape(random_cloud(200, 3, 13), 0.2);
  const auto j = s.to_json();
  CHECK(j.contains("points"));
  CHECK(j.contains("simplices"));
  CHECK(j.contains("boundary_facets"));
  CHECK(j.contains("alpha_radius"));
  CHECK(j.contains("region_labels"));
  CHECK(j.contains("normalization"));
  const auto r = AlphaShape::from_json(j);
  CHECK(r.simplices() == s.simplices());
  CHECK(r.boundary_facets() == s.boundary_facets());
  CHECK(r.region_labels() == s.region_labels());
  CHECK(r.measure() == doctest::Approx(s.measure()));
  CHECK(r.to_json() == j);
  const auto hull = convex_hull(random_cloud(20, 2, 1));
  CHECK(hull.to_json()["alpha_radius"].is_null());
  CHECK(std::isinf(AlphaShape::from_json(hull.to_json()).alpha_radius()));
}
