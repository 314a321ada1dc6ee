#include "dspace/sampling/sobol.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <ostream>

#include "dspace/error.hpp"
#include "dspace/util/csv.hpp"

namespace dspace::sampling {

namespace {

struct Primitive {
  std::uint32_t poly;  // includes the leading and constant terms
  std::array<std::uint32_t, 8> m;
};

// Joe-Kuo (new-joe-kuo-6.21201) entries for dimensions 2..32; dimension 1
// uses m_k = 1 throughout.
constexpr Primitive kTable[] = {
    {3, {1}},
    {7, {1, 3}},
    {11, {1, 3, 1}},
    {13, {1, 1, 1}},
    {19, {1, 1, 3, 3}},
    {25, {1, 3, 5, 13}},
    {37, {1, 1, 5, 5, 17}},
    {41, {1, 1, 5, 5, 5}},
    {47, {1, 1, 7, 11, 19}},
    {55, {1, 1, 5, 1, 1}},
    {59, {1, 1, 1, 3, 11}},
    {61, {1, 3, 5, 5, 31}},
    {67, {1, 3, 3, 9, 7, 49}},
    {91, {1, 1, 1, 15, 21, 21}},
    {97, {1, 3, 1, 13, 27, 49}},
    {103, {1, 1, 1, 15, 7, 5}},
    {109, {1, 3, 1, 15, 13, 25}},
    {115, {1, 1, 5, 5, 19, 61}},
    {131, {1, 3, 7, 11, 23, 15, 103}},
    {137, {1, 3, 7, 13, 13, 15, 69}},
    {143, {1, 1, 3, 13, 7, 35, 63}},
    {145, {1, 3, 5, 9, 1, 25, 53}},
    {157, {1, 3, 1, 13, 9, 35, 107}},
    {167, {1, 3, 1, 5, 27, 61, 31}},
    {171, {1, 1, 5, 11, 19, 41, 61}},
    {185, {1, 3, 5, 3, 3, 13, 69}},
    {191, {1, 1, 7, 13, 1, 19, 1}},
    {193, {1, 3, 7, 5, 13, 19, 59}},
    {203, {1, 1, 3, 9, 25, 29, 41}},
    {211, {1, 3, 5, 13, 23, 1, 55}},
    {213, {1, 3, 7, 3, 13, 59, 17}},
};

}  // namespace

std::size_t SobolSequence::max_dim() { return 1 + std::size(kTable); }

SobolSequence::SobolSequence(std::size_t dim) : dim_(dim), v_(dim * kBits) {
  if (dim == 0 || dim > max_dim()) {
    throw InvalidBounds("Sobol dimension must be in [1, " + std::to_string(max_dim()) + "], got " +
                        std::to_string(dim));
  }
  std::vector<std::uint32_t> m(kBits);
  for (std::size_t d = 0; d < dim; ++d) {
    if (d == 0) {
      std::fill(m.begin(), m.end(), 1u);
    } else {
      const Primitive& pr = kTable[d - 1];
      const int s = std::bit_width(pr.poly) - 1;
      for (int j = 0; j < s; ++j) m[j] = pr.m[j];
      for (unsigned j = s; j < kBits; ++j) {
        std::uint32_t next = m[j - s];
        for (int k = 1; k <= s; ++k) {
          if ((pr.poly >> (s - k)) & 1u) next ^= m[j - k] << k;
        }
        m[j] = next;
      }
    }
    for (unsigned j = 0; j < kBits; ++j) v_[d * kBits + j] = m[j] << (kBits - 1 - j);
  }
}

void SobolSequence::point(std::uint64_t index, double* out) const {
  if (index >= (std::uint64_t{1} << kBits)) throw InvalidBounds("Sobol index exceeds 2^30");
  const std::uint64_t gray = index ^ (index >> 1);
  constexpr double scale = 1.0 / static_cast<double>(1u << kBits);
  for (std::size_t d = 0; d < dim_; ++d) {
    std::uint32_t x = 0;
    for (unsigned j = 0; j < kBits; ++j)
      if ((gray >> j) & 1u) x ^= v_[d * kBits + j];
    out[d] = x * scale;
  }
}

geometry::PointCloud SobolSequence::points(std::uint64_t first, std::uint64_t count) const {
  std::vector<double> coords(count * dim_);
  for (std::uint64_t i = 0; i < count; ++i) point(first + i, coords.data() + i * dim_);
  return geometry::PointCloud(dim_, std::move(coords));
}

void Bounds::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    throw InvalidBounds("bounds need matching non-empty lower/upper vectors");
  }
  if (!names.empty() && names.size() != lower.size()) {
    throw InvalidBounds("bounds have " + std::to_string(names.size()) + " names for " +
                        std::to_string(lower.size()) + " decisions");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i])) {
      throw InvalidBounds("decision " + std::to_string(i) + ": need finite lower < upper, got [" +
                          util::format_double(lower[i]) + ", " + util::format_double(upper[i]) +
                          "]");
    }
  }
}

bool Bounds::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

nlohmann::json Bounds::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < dim(); ++i) {
    const std::string name = i < names.size() ? names[i] : "x" + std::to_string(i + 1);
    j.push_back({{"name", name}, {"lower", lower[i]}, {"upper", upper[i]}});
  }
  return j;
}

Bounds Bounds::from_json(const nlohmann::json& j) {
  Bounds b;
  if (!j.is_array()) throw InvalidBounds("bounds must be an array of {name, lower, upper}");
  for (const auto& e : j) {
    b.names.push_back(e.value("name", "x" + std::to_string(b.names.size() + 1)));
    b.lower.push_back(e.at("lower").get<double>());
    b.upper.push_back(e.at("upper").get<double>());
  }
  b.validate();
  return b;
}

SampleBatch sobol(std::size_t dim, const Bounds& bounds, unsigned sp, bool skip_zero,
                  std::uint64_t offset) {
  bounds.validate();
  if (bounds.dim() != dim) {
    throw InvalidBounds("bounds have dimension " + std::to_string(bounds.dim()) + ", expected " +
                        std::to_string(dim));
  }
  if (sp < 1 || sp >= SobolSequence::kBits) {
    throw InvalidBounds("sp must be in [1, " + std::to_string(SobolSequence::kBits - 1) + "]");
  }
  SampleBatch batch;
  batch.sp = sp;
  batch.names = bounds.names;
  batch.first_index = offset + (skip_zero ? 1 : 0);
  const SobolSequence seq(dim);
  batch.inputs = bounds.normalization().from_unit(seq.points(batch.first_index, 1ULL << sp));
  return batch;
}

void write_csv(std::ostream& out, const SampleBatch& batch) {
  const std::size_t d = batch.inputs.dim();
  std::vector<std::string> fields(d);
  for (std::size_t k = 0; k < d; ++k)
    fields[k] = k < batch.names.size() ? batch.names[k] : "x" + std::to_string(k + 1);
  util::write_csv_row(out, fields);
  for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) fields[k] = util::format_double(batch.inputs[i][k]);
    util::write_csv_row(out, fields);
  }
}

void write_csv(const std::string& path, const SampleBatch& batch) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_csv(out, batch);
}

}  // namespace dspace::sampling
