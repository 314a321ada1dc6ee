#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "dspace/error.hpp"
#include "dspace/geometry/predicates.hpp"
#include "dspace/geometry/triangulation.hpp"

namespace dspace::geometry {

namespace {

constexpr int kInfinite = -1;

std::uint64_t spread_bits(std::uint64_t v, int dim) {
  // Interleave the low bits of v with (dim - 1) zero bits between them.
  std::uint64_t out = 0;
  const int bits = dim == 2 ? 31 : 21;
  for (int b = 0; b < bits; ++b) out |= ((v >> b) & 1ULL) << (b * dim);
  return out;
}

std::vector<std::size_t> morton_order(const PointCloud& pts, const std::vector<std::size_t>& ids) {
  const std::size_t d = pts.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t id : ids)
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], pts[id][k]);
      hi[k] = std::max(hi[k], pts[id][k]);
    }
  const double cells = d == 2 ? 2147483647.0 : 2097151.0;
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
  keyed.reserve(ids.size());
  for (std::size_t id : ids) {
    std::uint64_t code = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const double span = hi[k] - lo[k];
      const double t = span > 0 ? (pts[id][k] - lo[k]) / span : 0.0;
      const auto q = static_cast<std::uint64_t>(t * cells);
      code |= spread_bits(q, static_cast<int>(d)) << k;
    }
    keyed.emplace_back(code, id);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> out;
  out.reserve(keyed.size());
  for (const auto& [code, id] : keyed) out.push_back(id);
  return out;
}

template <int D>
class Builder {
  static constexpr int K = D + 1;

  struct Cell {
    std::array<int, K> v;
    std::array<int, K> n;
    bool alive = true;
  };

 public:
  explicit Builder(const PointCloud& pts) : pts_(pts), data_(pts.coords().data()) {}

  Triangulation run() {
    std::vector<std::size_t> unique = deduplicate();
    if (unique.size() < static_cast<std::size_t>(K)) {
      throw DegenerateInput("need at least " + std::to_string(K) + " distinct points, got " +
                            std::to_string(unique.size()));
    }
    std::vector<std::size_t> order = morton_order(pts_, unique);
    std::array<std::size_t, K> seed = initial_simplex(order);
    create_initial(seed);

    for (std::size_t id : order) {
      if (std::find(seed.begin(), seed.end(), id) != seed.end()) continue;
      insert(static_cast<int>(id));
    }
    return collect();
  }

 private:
  const double* P(int id) const { return data_ + static_cast<std::size_t>(id) * D; }

  std::vector<std::size_t> deduplicate() {
    std::vector<std::size_t> idx(pts_.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
      for (int k = 0; k < D; ++k) {
        if (pts_[a][k] != pts_[b][k]) return pts_[a][k] < pts_[b][k];
      }
      return a < b;
    };
    std::sort(idx.begin(), idx.end(), less);
    std::vector<std::size_t> unique;
    unique.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      bool dup = false;
      if (!unique.empty()) {
        const std::size_t prev = unique.back();
        dup = std::equal(pts_[prev].begin(), pts_[prev].end(), pts_[idx[i]].begin());
      }
      if (dup) {
        duplicates_.push_back(idx[i]);
      } else {
        unique.push_back(idx[i]);
      }
    }
    std::sort(duplicates_.begin(), duplicates_.end());
    return unique;
  }

  bool collinear3(std::size_t a, std::size_t b, std::size_t c) const {
    // Three 3D points are collinear iff every coordinate-plane projection is.
    for (int drop = 0; drop < 3; ++drop) {
      double pa[2], pb[2], pc[2];
      int m = 0;
      for (int k = 0; k < 3; ++k) {
        if (k == drop) continue;
        pa[m] = pts_[a][k];
        pb[m] = pts_[b][k];
        pc[m] = pts_[c][k];
        ++m;
      }
      if (predicates::orient2d(pa, pb, pc) != 0) return false;
    }
    return true;
  }

  std::array<std::size_t, K> initial_simplex(const std::vector<std::size_t>& order) const {
    std::array<std::size_t, K> s{};
    s[0] = order[0];
    s[1] = order[1];  // distinct after deduplication
    std::size_t next = 2;
    if constexpr (D == 3) {
      bool found = false;
      for (; next < order.size(); ++next) {
        if (!collinear3(s[0], s[1], order[next])) {
          s[2] = order[next++];
          found = true;
          break;
        }
      }
      if (!found) throw DegenerateInput("all points are collinear");
    }
    for (; next < order.size(); ++next) {
      std::array<const double*, K> p{};
      for (int k = 0; k < D; ++k) p[k] = P(static_cast<int>(s[k]));
      p[D] = P(static_cast<int>(order[next]));
      if (predicates::orient(D, p) != 0) {
        s[D] = order[next];
        return s;
      }
    }
    throw DegenerateInput(D == 2 ? "all points are collinear" : "all points are coplanar");
  }

  int orient_cell(const std::array<int, K>& v) const {
    std::array<const double*, K> p{};
    for (int k = 0; k < K; ++k) p[k] = P(v[k]);
    return predicates::orient(D, p);
  }

  static bool is_ghost(const Cell& c) {
    for (int x : c.v)
      if (x == kInfinite) return true;
    return false;
  }

  int alloc() {
    if (!free_.empty()) {
      const int c = free_.back();
      free_.pop_back();
      cells_[c].alive = true;
      return c;
    }
    cells_.push_back(Cell{});
    mark_.push_back(0);
    return static_cast<int>(cells_.size()) - 1;
  }

  void create_initial(const std::array<std::size_t, K>& seed) {
    std::array<int, K> v{};
    for (int k = 0; k < K; ++k) v[k] = static_cast<int>(seed[k]);
    if (orient_cell(v) < 0) std::swap(v[0], v[1]);

    std::vector<int> made;
    const int f = alloc();
    cells_[f].v = v;
    made.push_back(f);
    for (int i = 0; i < K; ++i) {
      const int g = alloc();
      std::array<int, K> gv = v;
      gv[i] = kInfinite;
      // Replacing v[i] by a point beyond the facet flips the orientation,
      // so swap two finite entries to keep ghosts positively oriented.
      const int a = (i + 1) % K, b = (i + 2) % K;
      std::swap(gv[a], gv[b]);
      cells_[g].v = gv;
      made.push_back(g);
    }
    // Match facets pairwise among the D+2 initial cells.
    for (int x : made) {
      for (int i = 0; i < K; ++i) {
        const auto fx = facet_key(cells_[x].v, i);
        for (int y : made) {
          if (y == x) continue;
          for (int j = 0; j < K; ++j) {
            if (facet_key(cells_[y].v, j) == fx) cells_[x].n[i] = y;
          }
        }
      }
    }
    last_ = f;
  }

  static std::array<int, D> facet_key(const std::array<int, K>& v, int skip) {
    std::array<int, D> key{};
    int m = 0;
    for (int k = 0; k < K; ++k)
      if (k != skip) key[m++] = v[k];
    std::sort(key.begin(), key.end());
    return key;
  }

  bool finite_conflict(int c, int pid) const {
    const Cell& cell = cells_[c];
    std::array<const double*, K> p{};
    std::array<std::size_t, K> ids{};
    for (int k = 0; k < K; ++k) {
      p[k] = P(cell.v[k]);
      ids[k] = static_cast<std::size_t>(cell.v[k]);
    }
    return predicates::insphere_sos(D, p, ids, P(pid), static_cast<std::size_t>(pid)) > 0;
  }

  bool conflict(int c, int pid) const {
    const Cell& cell = cells_[c];
    int inf = -1;
    for (int k = 0; k < K; ++k)
      if (cell.v[k] == kInfinite) inf = k;
    if (inf < 0) return finite_conflict(c, pid);
    std::array<const double*, K> p{};
    for (int k = 0; k < K; ++k) p[k] = k == inf ? P(pid) : P(cell.v[k]);
    const int o = predicates::orient(D, p);
    if (o != 0) return o > 0;
    // Coplanar with a hull facet: defer to the finite cell behind that facet
    // so both sides of the facet agree under the same perturbation.
    return finite_conflict(cell.n[inf], pid);
  }

  std::uint32_t next_random() {
    rng_ ^= rng_ << 13;
    rng_ ^= rng_ >> 7;
    rng_ ^= rng_ << 17;
    return static_cast<std::uint32_t>(rng_);
  }

  int locate(int pid) {
    int c = last_;
    if (!cells_[c].alive || is_ghost(cells_[c])) {
      c = -1;
      for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].alive && !is_ghost(cells_[i])) {
          c = static_cast<int>(i);
          break;
        }
      }
    }
    const std::size_t max_steps = 4 * cells_.size() + 1000;
    for (std::size_t step = 0; step < max_steps; ++step) {
      const Cell& cell = cells_[c];
      const int start = static_cast<int>(next_random() % K);
      int moved_to = -1;
      for (int t = 0; t < K; ++t) {
        const int i = (start + t) % K;
        std::array<const double*, K> p{};
        for (int k = 0; k < K; ++k) p[k] = k == i ? P(pid) : P(cell.v[k]);
        if (predicates::orient(D, p) < 0) {
          moved_to = cell.n[i];
          break;
        }
      }
      if (moved_to < 0) return c;
      if (is_ghost(cells_[moved_to])) return moved_to;
      c = moved_to;
    }
    // The walk is acyclic for regular triangulations; this is a safety net.
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i].alive && conflict(static_cast<int>(i), pid)) return static_cast<int>(i);
    }
    throw DegenerateInput("point location failed");
  }

  void insert(int pid) {
    const int start = locate(pid);
    if (!is_ghost(cells_[start])) {
      for (int v : cells_[start].v) {
        if (std::equal(P(v), P(v) + D, P(pid))) return;
      }
    }

    ++epoch_;
    cavity_.clear();
    boundary_.clear();
    stack_.clear();
    stack_.push_back(start);
    mark_[start] = epoch_;
    while (!stack_.empty()) {
      const int x = stack_.back();
      stack_.pop_back();
      cavity_.push_back(x);
      for (int i = 0; i < K; ++i) {
        const int nb = cells_[x].n[i];
        if (mark_[nb] == epoch_) continue;
        if (mark_[nb] == -epoch_) {
          boundary_.emplace_back(x, i);
          continue;
        }
        if (conflict(nb, pid)) {
          mark_[nb] = epoch_;
          stack_.push_back(nb);
        } else {
          mark_[nb] = -epoch_;
          boundary_.emplace_back(x, i);
        }
      }
    }

    created_.clear();
    for (const auto& [x, i] : boundary_) {
      const int nc = alloc();
      Cell& cell = cells_[nc];
      cell.v = cells_[x].v;
      cell.v[i] = pid;
      const int outside = cells_[x].n[i];
      cell.n[i] = outside;
      for (int j = 0; j < K; ++j) {
        if (cells_[outside].n[j] == x) cells_[outside].n[j] = nc;
      }
      created_.emplace_back(nc, i);
    }

    // Link new cells across the ridges that contain the inserted point.
    ridge_map_.clear();
    for (const auto& [nc, ip] : created_) {
      for (int j = 0; j < K; ++j) {
        if (j == ip) continue;
        std::array<int, D - 1> ridge{};
        int m = 0;
        for (int k = 0; k < K; ++k)
          if (k != ip && k != j) ridge[m++] = cells_[nc].v[k];
        std::sort(ridge.begin(), ridge.end());
        std::uint64_t key = 0;
        for (int r : ridge) key = (key << 32) | static_cast<std::uint32_t>(r + 1);
        auto [it, inserted] = ridge_map_.try_emplace(key, nc, j);
        if (!inserted) {
          cells_[nc].n[j] = it->second.first;
          cells_[it->second.first].n[it->second.second] = nc;
        }
      }
    }

    for (int x : cavity_) {
      cells_[x].alive = false;
      free_.push_back(x);
    }
    for (const auto& [nc, ip] : created_) {
      if (!is_ghost(cells_[nc])) {
        last_ = nc;
        break;
      }
    }
  }

  Triangulation collect() const {
    Triangulation t;
    t.points = pts_;
    t.duplicates = duplicates_;
    std::vector<int> remap(cells_.size(), -1);
    int count = 0;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (cells_[c].alive && !is_ghost(cells_[c])) remap[c] = count++;
    }
    t.simplices.reserve(static_cast<std::size_t>(count) * K);
    t.neighbors.reserve(static_cast<std::size_t>(count) * K);
    t.circumradii.reserve(count);
    t.volumes.reserve(count);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (remap[c] < 0) continue;
      std::array<const double*, K> p{};
      for (int k = 0; k < K; ++k) {
        t.simplices.push_back(cells_[c].v[k]);
        t.neighbors.push_back(remap[cells_[c].n[k]]);
        p[k] = P(cells_[c].v[k]);
      }
      t.circumradii.push_back(detail::circumradius_raw(D, p));
      t.volumes.push_back(std::abs(signed_volume(D, p)));
    }
    return t;
  }

  const PointCloud& pts_;
  const double* data_;
  std::vector<Cell> cells_;
  std::vector<int> mark_;
  std::vector<int> free_;
  std::vector<std::size_t> duplicates_;
  int last_ = 0;
  int epoch_ = 0;
  std::uint64_t rng_ = 0x9E3779B97F4A7C15ULL;

  std::vector<int> cavity_;
  std::vector<int> stack_;
  std::vector<std::pair<int, int>> boundary_;
  std::vector<std::pair<int, int>> created_;
  std::unordered_map<std::uint64_t, std::pair<int, int>> ridge_map_;
};

}  // namespace

Triangulation delaunay(const PointCloud& points) {
  if (points.dim() == 2) return Builder<2>(points).run();
  if (points.dim() == 3) return Builder<3>(points).run();
  throw DimensionMismatch("Delaunay triangulation supports 2D and 3D points, got dimension " +
                          std::to_string(points.dim()));
}

double Triangulation::max_circumradius() const {
  double r = 0.0;
  for (std::size_t s = 0; s < size(); ++s) {
    if (volumes[s] >= kDegenerateVolume) r = std::max(r, circumradii[s]);
  }
  return r;
}

}  // namespace dspace::geometry
