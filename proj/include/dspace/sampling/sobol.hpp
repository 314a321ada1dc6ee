#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dspace/geometry/point_cloud.hpp"

namespace dspace::sampling {

/// Box of admissible decision values in physical units.
struct Bounds {
  std::vector<std::string> names;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  /// Throws InvalidBounds unless lower < upper elementwise and all finite.
  void validate() const;
  geometry::Normalization normalization() const { return {lower, upper}; }
  bool contains(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static Bounds from_json(const nlohmann::json& j);
};

struct SampleBatch {
  geometry::PointCloud inputs;  // physical units
  std::vector<std::string> names;
  unsigned sp = 0;
  /// Sequence index of the first row; 1 when the all-zeros point is skipped.
  std::uint64_t first_index = 0;
};

/// Unscrambled Sobol sequence with Joe-Kuo direction numbers and Gray-code
/// ordering, matching the conventional 30-bit generator output.
class SobolSequence {
 public:
  static constexpr unsigned kBits = 30;
  static std::size_t max_dim();

  explicit SobolSequence(std::size_t dim);
  std::size_t dim() const { return dim_; }

  /// Point number `index` of the sequence in [0,1)^dim.
  void point(std::uint64_t index, double* out) const;
  /// `count` consecutive points starting at `first`.
  geometry::PointCloud points(std::uint64_t first, std::uint64_t count) const;

 private:
  std::size_t dim_;
  std::vector<std::uint32_t> v_;  // dim x kBits direction integers
};

/// 2^sp Sobol points scaled into `bounds`. With skip_zero the sequence starts
/// at index 1; `offset` shifts the start further (used to draw fresh points
/// that do not repeat an earlier batch).
SampleBatch sobol(std::size_t dim, const Bounds& bounds, unsigned sp, bool skip_zero = false,
                  std::uint64_t offset = 0);

/// Header row of decision names, one row per sample.
void write_csv(std::ostream& out, const SampleBatch& batch);
void write_csv(const std::string& path, const SampleBatch& batch);

}  // namespace dspace::sampling
