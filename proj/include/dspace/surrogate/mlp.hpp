#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dspace/geometry/point_cloud.hpp"

namespace dspace::surrogate {

enum class Activation { relu, tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Per-column affine map onto [0,1]. A constant column (max == min) maps to 0
/// and back to its constant, so a constant target is reproduced exactly.
struct MinMax {
  std::vector<double> lower;
  std::vector<double> upper;

  static MinMax fit(const geometry::PointCloud& data);
  std::size_t dim() const { return lower.size(); }
  double normalize(std::size_t i, double x) const;
  double denormalize(std::size_t i, double z) const;

  nlohmann::json to_json() const;
  static MinMax from_json(const nlohmann::json& j);
};

/// Fully connected network, hidden layers share one activation, linear output.
class MlpModel {
 public:
  MlpModel() = default;
  /// Weights drawn uniformly in +-sqrt(6 / fan_in), biases zero.
  MlpModel(std::vector<int> sizes, Activation act, std::uint64_t seed);

  const std::vector<int>& sizes() const { return sizes_; }
  std::size_t n_inputs() const { return static_cast<std::size_t>(sizes_.front()); }
  std::size_t n_outputs() const { return static_cast<std::size_t>(sizes_.back()); }
  std::size_t n_layers() const { return weights_.size(); }
  Activation activation() const { return act_; }

  Eigen::MatrixXd& weight(std::size_t l) { return weights_[l]; }
  const Eigen::MatrixXd& weight(std::size_t l) const { return weights_[l]; }
  Eigen::VectorXd& bias(std::size_t l) { return biases_[l]; }
  const Eigen::VectorXd& bias(std::size_t l) const { return biases_[l]; }
  std::size_t parameter_count() const;

  MinMax& input_scaling() { return in_; }
  const MinMax& input_scaling() const { return in_; }
  MinMax& output_scaling() { return out_; }
  const MinMax& output_scaling() const { return out_; }

  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  nlohmann::json metadata = nlohmann::json::object();

  /// Normalized in, normalized out; one sample per column.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  /// Mean squared error over all entries of a normalized batch and its
  /// gradient with respect to every weight and bias (same shapes).
  double loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           std::vector<Eigen::MatrixXd>& grad_w,
                           std::vector<Eigen::VectorXd>& grad_b) const;

  /// Physical units in and out, one sample per row. Inputs outside the
  /// training range are extrapolated.
  geometry::PointCloud predict(const geometry::PointCloud& inputs) const;
  std::vector<double> predict(std::span<const double> input) const;

  nlohmann::json to_json() const;
  static MlpModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static MlpModel load(const std::string& path);

 private:
  std::vector<int> sizes_;
  Activation act_ = Activation::relu;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
  MinMax in_;
  MinMax out_;
};

struct TrainConfig {
  std::vector<int> hidden{64, 64, 64};
  Activation activation = Activation::relu;
  int epochs = 5000;
  double learning_rate = 1e-4;
  std::size_t batch_size = 64;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct TrainReport {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double final_loss = 0.0;  // normalized MSE on the training split
  std::vector<double> train_mpe;
  std::vector<double> test_mpe;

  nlohmann::json to_json() const;
};

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

/// Adam on shuffled mini-batches. Needs at least 100 rows; throws
/// DivergedTraining if the loss turns non-finite.
TrainResult train(const geometry::PointCloud& inputs, const geometry::PointCloud& outputs,
                  const TrainConfig& config);

/// Mean |pred - label| / |label| * 100 per column, skipping labels with
/// magnitude below 1e-12. A column with no usable label yields NaN. Throws
/// EmptyInput for zero rows and DimensionMismatch for unequal shapes.
std::vector<double> mpe(const geometry::PointCloud& predictions, const geometry::PointCloud& labels);

}  // namespace dspace::surrogate
