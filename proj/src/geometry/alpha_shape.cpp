#include "dspace/geometry/alpha_shape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <string>

#include "dspace/error.hpp"

namespace dspace::geometry {

bool barycentric(std::size_t dim, std::span<const double* const> v, const double* q,
                 double* lambda) {
  // Solve T * l = q - v_d with T columns v_i - v_d, then l_d = 1 - sum.
  const double* o = v[dim];
  if (dim == 2) {
    const double a = v[0][0] - o[0], b = v[1][0] - o[0];
    const double c = v[0][1] - o[1], d = v[1][1] - o[1];
    const double det = a * d - b * c;
    if (det == 0.0) return false;
    const double x = q[0] - o[0], y = q[1] - o[1];
    lambda[0] = (d * x - b * y) / det;
    lambda[1] = (a * y - c * x) / det;
    lambda[2] = 1.0 - lambda[0] - lambda[1];
    return true;
  }
  double m[3][3];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = v[c][r] - o[r];
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (det == 0.0) return false;
  const double x[3] = {q[0] - o[0], q[1] - o[1], q[2] - o[2]};
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    double mc[3][3];
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) mc[r][k] = k == c ? x[r] : m[r][k];
    const double dc = mc[0][0] * (mc[1][1] * mc[2][2] - mc[1][2] * mc[2][1]) -
                      mc[0][1] * (mc[1][0] * mc[2][2] - mc[1][2] * mc[2][0]) +
                      mc[0][2] * (mc[1][0] * mc[2][1] - mc[1][1] * mc[2][0]);
    lambda[c] = dc / det;
    sum += lambda[c];
  }
  lambda[3] = 1.0 - sum;
  return true;
}

// Uniform grid over the retained simplices' bounding boxes, built on first use.
class Locator {
 public:
  void ensure(const AlphaShape& s) {
    std::call_once(once_, [&] { build(s); });
  }

  int find(const AlphaShape& s, const double* q) const {
    if (!ready_) return -1;
    std::array<int, 3> c{};
    for (std::size_t k = 0; k < dim_; ++k) {
      if (q[k] < lo_[k] - margin_ || q[k] > hi_[k] + margin_) return -1;
      c[k] = std::clamp(static_cast<int>((q[k] - lo_[k]) / step_[k]), 0, n_[k] - 1);
    }
    const std::size_t cell = index(c);
    std::array<double, 4> lambda{};
    std::array<const double*, 4> v{};
    for (int i = start_[cell]; i < start_[cell + 1]; ++i) {
      const int sid = items_[i];
      const auto simplex = s.simplex(static_cast<std::size_t>(sid));
      for (std::size_t k = 0; k <= dim_; ++k) v[k] = s.points()[simplex[k]].data();
      if (!barycentric(dim_, std::span<const double* const>(v.data(), dim_ + 1), q,
                       lambda.data()))
        continue;
      bool inside = true;
      for (std::size_t k = 0; k <= dim_ && inside; ++k)
        inside = lambda[k] >= -kContainmentTolerance;
      if (inside) return sid;
    }
    return -1;
  }

 private:
  std::size_t index(const std::array<int, 3>& c) const {
    std::size_t idx = 0;
    for (std::size_t k = dim_; k-- > 0;) idx = idx * n_[k] + c[k];
    return idx;
  }

  void build(const AlphaShape& s) {
    dim_ = s.dim();
    const std::size_t ns = s.size();
    if (ns == 0) return;
    lo_.fill(std::numeric_limits<double>::infinity());
    hi_.fill(-std::numeric_limits<double>::infinity());
    std::vector<double> box(ns * 2 * dim_);
    for (std::size_t t = 0; t < ns; ++t) {
      double* blo = &box[t * 2 * dim_];
      double* bhi = blo + dim_;
      for (std::size_t k = 0; k < dim_; ++k) {
        blo[k] = std::numeric_limits<double>::infinity();
        bhi[k] = -std::numeric_limits<double>::infinity();
      }
      for (int vid : s.simplex(t)) {
        const auto p = s.points()[vid];
        for (std::size_t k = 0; k < dim_; ++k) {
          blo[k] = std::min(blo[k], p[k]);
          bhi[k] = std::max(bhi[k], p[k]);
        }
      }
      for (std::size_t k = 0; k < dim_; ++k) {
        lo_[k] = std::min(lo_[k], blo[k]);
        hi_[k] = std::max(hi_[k], bhi[k]);
      }
    }
    double extent = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) extent = std::max(extent, hi_[k] - lo_[k]);
    margin_ = 1e-9 * std::max(extent, 1.0);

    const int per_axis = std::clamp(
        static_cast<int>(std::ceil(std::pow(static_cast<double>(ns), 1.0 / dim_))), 1,
        dim_ == 2 ? 512 : 96);
    std::size_t total = 1;
    for (std::size_t k = 0; k < dim_; ++k) {
      n_[k] = per_axis;
      step_[k] = std::max(hi_[k] - lo_[k], 1e-300) / per_axis;
      total *= per_axis;
    }

    auto cell_range = [&](std::size_t t, std::array<int, 3>& a, std::array<int, 3>& b) {
      const double* blo = &box[t * 2 * dim_];
      const double* bhi = blo + dim_;
      for (std::size_t k = 0; k < dim_; ++k) {
        a[k] = std::clamp(static_cast<int>((blo[k] - margin_ - lo_[k]) / step_[k]), 0, n_[k] - 1);
        b[k] = std::clamp(static_cast<int>((bhi[k] + margin_ - lo_[k]) / step_[k]), 0, n_[k] - 1);
      }
    };
    auto for_cells = [&](const std::array<int, 3>& a, const std::array<int, 3>& b, auto&& fn) {
      std::array<int, 3> c{};
      const int z0 = dim_ == 3 ? a[2] : 0, z1 = dim_ == 3 ? b[2] : 0;
      for (c[2] = z0; c[2] <= z1; ++c[2])
        for (c[1] = a[1]; c[1] <= b[1]; ++c[1])
          for (c[0] = a[0]; c[0] <= b[0]; ++c[0]) fn(index(c));
    };

    start_.assign(total + 1, 0);
    for (std::size_t t = 0; t < ns; ++t) {
      std::array<int, 3> a{}, b{};
      cell_range(t, a, b);
      for_cells(a, b, [&](std::size_t cell) { ++start_[cell + 1]; });
    }
    for (std::size_t i = 0; i < total; ++i) start_[i + 1] += start_[i];
    items_.resize(start_[total]);
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t t = 0; t < ns; ++t) {
      std::array<int, 3> a{}, b{};
      cell_range(t, a, b);
      for_cells(a, b, [&](std::size_t cell) { items_[fill[cell]++] = static_cast<int>(t); });
    }
    ready_ = true;
  }

  std::once_flag once_;
  std::size_t dim_ = 0;
  std::array<double, 3> lo_{}, hi_{}, step_{};
  std::array<int, 3> n_{1, 1, 1};
  double margin_ = 0.0;
  std::vector<int> start_;
  std::vector<int> items_;
  bool ready_ = false;
};

namespace {

void link_neighbors(std::size_t dim, const std::vector<int>& simplices, std::vector<int>& nb) {
  const std::size_t k = dim + 1;
  const std::size_t ns = simplices.size() / k;
  nb.assign(simplices.size(), -1);
  std::map<std::array<int, 3>, std::pair<int, int>> open;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      std::array<int, 3> key{-1, -1, -1};
      std::size_t m = 0;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) key[m++] = simplices[s * k + j];
      std::sort(key.begin(), key.begin() + dim);
      auto [it, inserted] = open.try_emplace(key, static_cast<int>(s), static_cast<int>(i));
      if (!inserted) {
        nb[s * k + i] = it->second.first;
        nb[static_cast<std::size_t>(it->second.first) * k + it->second.second] =
            static_cast<int>(s);
        open.erase(it);
      }
    }
  }
}

}  // namespace

void AlphaShape::finish() {
  const std::size_t k = dim() + 1;
  const std::size_t ns = size();

  boundary_facets_.clear();
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      if (neighbors_[s * k + i] >= 0) continue;
      const std::size_t first = boundary_facets_.size();
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) boundary_facets_.push_back(simplices_[s * k + j]);
      // Moving the opposite vertex to the front takes i transpositions.
      if (i % 2 == 1) std::swap(boundary_facets_[first], boundary_facets_[first + 1]);
    }
  }

  region_labels_.assign(ns, -1);
  n_regions_ = 0;
  std::deque<int> queue;
  for (std::size_t seed = 0; seed < ns; ++seed) {
    if (region_labels_[seed] >= 0) continue;
    const int label = n_regions_++;
    region_labels_[seed] = label;
    queue.push_back(static_cast<int>(seed));
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < k; ++i) {
        const int nb = neighbors_[static_cast<std::size_t>(s) * k + i];
        if (nb >= 0 && region_labels_[nb] < 0) {
          region_labels_[nb] = label;
          queue.push_back(nb);
        }
      }
    }
  }
  locator_ = std::make_shared<Locator>();
}

std::size_t AlphaShape::boundary_facet_count() const {
  return dim() == 0 ? 0 : boundary_facets_.size() / dim();
}

std::vector<int> AlphaShape::boundary_vertices() const {
  std::vector<int> v = boundary_facets_;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<int> AlphaShape::vertices() const {
  std::vector<int> v = simplices_;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> AlphaShape::region_measures() const {
  std::vector<double> m(static_cast<std::size_t>(n_regions_), 0.0);
  for (std::size_t s = 0; s < size(); ++s) m[region_labels_[s]] += volumes_[s];
  return m;
}

double AlphaShape::measure() const {
  double m = 0.0;
  for (double v : volumes_) m += v;
  return m;
}

int AlphaShape::locate(std::span<const double> query) const {
  if (empty()) return -1;
  if (query.size() != dim()) {
    throw DimensionMismatch("query of dimension " + std::to_string(query.size()) +
                            " against shape of dimension " + std::to_string(dim()));
  }
  locator_->ensure(*this);
  return locator_->find(*this, query.data());
}

bool AlphaShape::contains(std::span<const double> query) const { return locate(query) >= 0; }

void AlphaShape::set_normalization(Normalization n) {
  if (n.dim() != dim()) throw DimensionMismatch("normalization dimension differs from shape");
  normalization_ = std::move(n);
}

nlohmann::json AlphaShape::to_json() const {
  using nlohmann::json;
  json j;
  json pts = json::array();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto p = points_[i];
    pts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  j["dim"] = dim();
  j["points"] = std::move(pts);
  const std::size_t k = dim() + 1;
  json simp = json::array();
  for (std::size_t s = 0; s < size(); ++s)
    simp.push_back(std::vector<int>(simplices_.begin() + s * k, simplices_.begin() + (s + 1) * k));
  j["simplices"] = std::move(simp);
  json facets = json::array();
  for (std::size_t f = 0; f < boundary_facet_count(); ++f) {
    facets.push_back(std::vector<int>(boundary_facets_.begin() + f * dim(),
                                      boundary_facets_.begin() + (f + 1) * dim()));
  }
  j["boundary_facets"] = std::move(facets);
  j["alpha_radius"] = std::isinf(alpha_radius_) ? json(nullptr) : json(alpha_radius_);
  j["region_labels"] = region_labels_;
  j["n_regions"] = n_regions_;
  j["measure"] = measure();
  const Normalization norm = normalization_.dim() == dim() ? normalization_
                                                           : Normalization::unit(dim());
  j["normalization"] = {{"lower", norm.lower}, {"upper", norm.upper}};
  return j;
}

AlphaShape AlphaShape::from_json(const nlohmann::json& j) {
  AlphaShape s;
  const auto rows = j.at("points").get<std::vector<std::vector<double>>>();
  s.points_ = PointCloud::from_rows(rows);
  const std::size_t d = s.points_.dim();
  if (d != 2 && d != 3) throw DimensionMismatch("alpha shape must be 2D or 3D");
  for (const auto& simplex : j.at("simplices")) {
    const auto v = simplex.get<std::vector<int>>();
    if (v.size() != d + 1) throw DimensionMismatch("simplex arity does not match dimension");
    for (int id : v) {
      if (id < 0 || static_cast<std::size_t>(id) >= s.points_.size())
        throw DimensionMismatch("simplex references missing point " + std::to_string(id));
    }
    s.simplices_.insert(s.simplices_.end(), v.begin(), v.end());
  }
  const auto& a = j.at("alpha_radius");
  s.alpha_radius_ = a.is_null() ? std::numeric_limits<double>::infinity() : a.get<double>();
  const std::size_t ns = s.simplices_.size() / (d + 1);
  for (std::size_t t = 0; t < ns; ++t) {
    std::array<const double*, 4> p{};
    for (std::size_t k = 0; k <= d; ++k) p[k] = s.points_[s.simplices_[t * (d + 1) + k]].data();
    std::span<const double* const> sp(p.data(), d + 1);
    s.volumes_.push_back(std::abs(signed_volume(d, sp)));
    s.circumradii_.push_back(detail::circumradius_raw(d, sp));
  }
  link_neighbors(d, s.simplices_, s.neighbors_);
  s.finish();
  if (j.contains("normalization")) {
    Normalization n{j["normalization"].at("lower").get<std::vector<double>>(),
                    j["normalization"].at("upper").get<std::vector<double>>()};
    s.set_normalization(std::move(n));
  }
  return s;
}

AlphaShape alpha_shape(const Triangulation& tri, double alpha_radius) {
  if (!(alpha_radius > 0.0)) {
    throw InvalidArgument("alpha radius must be positive, got " + std::to_string(alpha_radius));
  }
  const std::size_t d = tri.dim();
  const std::size_t k = d + 1;
  std::vector<int> keep(tri.size(), -1);
  AlphaShape s;
  s.points_ = tri.points;
  s.alpha_radius_ = alpha_radius;
  int count = 0;
  for (std::size_t t = 0; t < tri.size(); ++t) {
    if (tri.volumes[t] < kDegenerateVolume) continue;
    if (tri.circumradii[t] <= alpha_radius) keep[t] = count++;
  }
  if (count == 0) {
    throw EmptyShape("no simplex has circumradius <= " + std::to_string(alpha_radius));
  }
  for (std::size_t t = 0; t < tri.size(); ++t) {
    if (keep[t] < 0) continue;
    const auto simplex = tri.simplex(t);
    const auto adj = tri.adjacent(t);
    s.simplices_.insert(s.simplices_.end(), simplex.begin(), simplex.end());
    for (std::size_t i = 0; i < k; ++i) s.neighbors_.push_back(adj[i] >= 0 ? keep[adj[i]] : -1);
    s.volumes_.push_back(tri.volumes[t]);
    s.circumradii_.push_back(tri.circumradii[t]);
  }
  s.normalization_ = Normalization::unit(d);
  s.finish();
  return s;
}

AlphaShape alpha_shape(const PointCloud& points, double alpha_radius) {
  return alpha_shape(delaunay(points), alpha_radius);
}

AlphaShape convex_hull(const PointCloud& points) {
  return alpha_shape(delaunay(points), std::numeric_limits<double>::infinity());
}

int count_regions(const AlphaShape& shape) {
  if (shape.empty()) throw EmptyShape("cannot count regions of an empty shape");
  return shape.n_regions();
}

}  // namespace dspace::geometry
