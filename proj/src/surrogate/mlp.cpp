#include "dspace/surrogate/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "dspace/error.hpp"

namespace dspace::surrogate {

namespace {

constexpr int kSchema = 1;

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::relu) return z.cwiseMax(0.0);
  return z.array().tanh().matrix();
}

// Derivative expressed through the activated value h = act(z).
Eigen::MatrixXd activate_grad(const Eigen::MatrixXd& h, Activation a) {
  if (a == Activation::relu) return (h.array() > 0.0).cast<double>().matrix();
  return (1.0 - h.array().square()).matrix();
}

Eigen::MatrixXd to_columns(const geometry::PointCloud& rows, const MinMax& scale) {
  Eigen::MatrixXd m(rows.dim(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = rows[r];
    for (std::size_t i = 0; i < rows.dim(); ++i) m(i, r) = scale.normalize(i, row[i]);
  }
  return m;
}

geometry::PointCloud to_rows(const Eigen::MatrixXd& cols, const MinMax& scale) {
  geometry::PointCloud out(cols.rows());
  out.reserve(cols.cols());
  std::vector<double> row(cols.rows());
  for (Eigen::Index r = 0; r < cols.cols(); ++r) {
    for (Eigen::Index i = 0; i < cols.rows(); ++i) row[i] = scale.denormalize(i, cols(i, r));
    out.push_back(row);
  }
  return out;
}

geometry::PointCloud subset(const geometry::PointCloud& src, const std::vector<std::size_t>& idx) {
  geometry::PointCloud out(src.dim());
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(src[i]);
  return out;
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + s + "'");
}

MinMax MinMax::fit(const geometry::PointCloud& data) {
  if (data.empty()) throw EmptyInput("cannot fit scaling on an empty table");
  MinMax m;
  m.lower.assign(data.dim(), std::numeric_limits<double>::infinity());
  m.upper.assign(data.dim(), -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t i = 0; i < data.dim(); ++i) {
      m.lower[i] = std::min(m.lower[i], data[r][i]);
      m.upper[i] = std::max(m.upper[i], data[r][i]);
    }
  }
  return m;
}

double MinMax::normalize(std::size_t i, double x) const {
  if (upper[i] == lower[i]) return 0.0;
  return (x - lower[i]) / (upper[i] - lower[i]);
}

double MinMax::denormalize(std::size_t i, double z) const {
  if (upper[i] == lower[i]) return lower[i];
  return lower[i] + z * (upper[i] - lower[i]);
}

nlohmann::json MinMax::to_json() const { return {{"lower", lower}, {"upper", upper}}; }

MinMax MinMax::from_json(const nlohmann::json& j) {
  MinMax m;
  m.lower = j.at("lower").get<std::vector<double>>();
  m.upper = j.at("upper").get<std::vector<double>>();
  if (m.lower.size() != m.upper.size()) throw ConfigError("scaling vectors differ in length");
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (!(m.upper[i] >= m.lower[i])) throw ConfigError("scaling needs upper >= lower");
  }
  return m;
}

MlpModel::MlpModel(std::vector<int> sizes, Activation act, std::uint64_t seed)
    : sizes_(std::move(sizes)), act_(act) {
  if (sizes_.size() < 2) throw InvalidArgument("network needs an input and an output layer");
  for (int s : sizes_) {
    if (s < 1) throw InvalidArgument("layer sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / sizes_[l]);
    Eigen::MatrixXd w(sizes_[l + 1], sizes_[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = limit * unit(rng);
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
  }
  in_.lower.assign(n_inputs(), 0.0);
  in_.upper.assign(n_inputs(), 1.0);
  out_.lower.assign(n_outputs(), 0.0);
  out_.upper.assign(n_outputs(), 1.0);
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

Eigen::MatrixXd MlpModel::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * h;
    z.colwise() += biases_[l];
    h = l + 1 < weights_.size() ? activate(z, act_) : std::move(z);
  }
  return h;
}

double MlpModel::loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                   std::vector<Eigen::MatrixXd>& grad_w,
                                   std::vector<Eigen::VectorXd>& grad_b) const {
  const std::size_t L = weights_.size();
  std::vector<Eigen::MatrixXd> h(L + 1);
  h[0] = x;
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd z = weights_[l] * h[l];
    z.colwise() += biases_[l];
    h[l + 1] = l + 1 < L ? activate(z, act_) : std::move(z);
  }
  const Eigen::MatrixXd diff = h[L] - y;
  const double count = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / count;

  grad_w.resize(L);
  grad_b.resize(L);
  Eigen::MatrixXd delta = (2.0 / count) * diff;
  for (std::size_t l = L; l-- > 0;) {
    grad_w[l].noalias() = delta * h[l].transpose();
    grad_b[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = weights_[l].transpose() * delta;
      delta = back.cwiseProduct(activate_grad(h[l], act_));
    }
  }
  return loss;
}

geometry::PointCloud MlpModel::predict(const geometry::PointCloud& inputs) const {
  if (inputs.dim() != n_inputs() && !inputs.empty()) {
    throw DimensionMismatch("model expects " + std::to_string(n_inputs()) + " inputs");
  }
  if (inputs.empty()) return geometry::PointCloud(n_outputs());
  return to_rows(forward(to_columns(inputs, in_)), out_);
}

std::vector<double> MlpModel::predict(std::span<const double> input) const {
  geometry::PointCloud one(input.size());
  one.push_back(input);
  const auto out = predict(one);
  return {out[0].begin(), out[0].end()};
}

nlohmann::json MlpModel::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    std::vector<double> w;
    w.reserve(weights_[l].size());
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) w.push_back(weights_[l](r, c));
    std::vector<double> b(biases_[l].data(), biases_[l].data() + biases_[l].size());
    layers.push_back({{"weights", w}, {"biases", b}});
  }
  return {{"schema_version", kSchema},
          {"sizes", sizes_},
          {"activation", to_string(act_)},
          {"layers", layers},
          {"input_scaling", in_.to_json()},
          {"output_scaling", out_.to_json()},
          {"input_names", input_names},
          {"output_names", output_names},
          {"metadata", metadata}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
  MlpModel m;
  try {
    m.sizes_ = j.at("sizes").get<std::vector<int>>();
    m.act_ = activation_from_string(j.at("activation").get<std::string>());
    const auto& layers = j.at("layers");
    if (m.sizes_.size() < 2 || layers.size() + 1 != m.sizes_.size()) {
      throw ConfigError("layer count does not match sizes");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto w = layers[l].at("weights").get<std::vector<double>>();
      const auto b = layers[l].at("biases").get<std::vector<double>>();
      const int rows = m.sizes_[l + 1], cols = m.sizes_[l];
      if (w.size() != static_cast<std::size_t>(rows) * cols || b.size() != static_cast<std::size_t>(rows)) {
        throw ConfigError("layer " + std::to_string(l) + " has the wrong shape");
      }
      Eigen::MatrixXd wm(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) wm(r, c) = w[static_cast<std::size_t>(r) * cols + c];
      m.weights_.push_back(std::move(wm));
      m.biases_.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), rows));
    }
    m.in_ = MinMax::from_json(j.at("input_scaling"));
    m.out_ = MinMax::from_json(j.at("output_scaling"));
    if (m.in_.dim() != m.n_inputs() || m.out_.dim() != m.n_outputs()) {
      throw ConfigError("scaling does not match layer sizes");
    }
    m.input_names = j.value("input_names", std::vector<std::string>{});
    m.output_names = j.value("output_names", std::vector<std::string>{});
    m.metadata = j.value("metadata", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model file: ") + e.what());
  }
  return m;
}

void MlpModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << to_json().dump(1) << '\n';
}

MlpModel MlpModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return from_json(j);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0,1)");
  }
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden widths must be positive");
  }
}

nlohmann::json TrainConfig::to_json() const {
  return {{"hidden", hidden},
          {"activation", to_string(activation)},
          {"epochs", epochs},
          {"learning_rate", learning_rate},
          {"batch_size", batch_size},
          {"beta1", beta1},
          {"beta2", beta2},
          {"epsilon", epsilon},
          {"train_fraction", train_fraction},
          {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.hidden = j.value("hidden", c.hidden);
    c.activation = activation_from_string(j.value("activation", to_string(c.activation)));
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json TrainReport::to_json() const {
  return {{"n_train", n_train},
          {"n_test", n_test},
          {"final_loss", final_loss},
          {"train_mpe", train_mpe},
          {"test_mpe", test_mpe}};
}

TrainResult train(const geometry::PointCloud& inputs, const geometry::PointCloud& outputs,
                  const TrainConfig& config) {
  config.validate();
  if (inputs.size() != outputs.size()) throw DimensionMismatch("inputs and outputs differ in rows");
  if (inputs.size() < 100) throw InvalidArgument("training needs at least 100 rows");
  for (double v : outputs.coords()) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite KPI value in training data");
  }

  std::vector<int> sizes{static_cast<int>(inputs.dim())};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(static_cast<int>(outputs.dim()));
  TrainResult result{MlpModel(sizes, config.activation, config.seed), {}};
  MlpModel& model = result.model;
  model.input_scaling() = MinMax::fit(inputs);
  model.output_scaling() = MinMax::fit(outputs);
  model.metadata["train_config"] = config.to_json();

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.train_fraction * inputs.size())));
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> test_idx(order.begin() + n_train, order.end());

  const auto train_in = subset(inputs, train_idx), train_out = subset(outputs, train_idx);
  const Eigen::MatrixXd X = to_columns(train_in, model.input_scaling());
  const Eigen::MatrixXd Y = to_columns(train_out, model.output_scaling());

  const std::size_t L = model.n_layers();
  std::vector<Eigen::MatrixXd> mw(L), vw(L), gw;
  std::vector<Eigen::VectorXd> mb(L), vb(L), gb;
  for (std::size_t l = 0; l < L; ++l) {
    mw[l] = vw[l] = Eigen::MatrixXd::Zero(model.weight(l).rows(), model.weight(l).cols());
    mb[l] = vb[l] = Eigen::VectorXd::Zero(model.bias(l).size());
  }

  const std::size_t n = train_idx.size();
  const std::size_t batch = std::min(config.batch_size, n);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::MatrixXd xb(X.rows(), batch), yb(Y.rows(), batch);
  double b1t = 1.0, b2t = 1.0;
  double epoch_loss = 0.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t m = std::min(batch, n - start);
      xb.resize(X.rows(), m);
      yb.resize(Y.rows(), m);
      for (std::size_t k = 0; k < m; ++k) {
        xb.col(k) = X.col(perm[start + k]);
        yb.col(k) = Y.col(perm[start + k]);
      }
      const double loss = model.loss_and_gradient(xb, yb, gw, gb);
      if (!std::isfinite(loss)) {
        throw DivergedTraining("loss became non-finite in epoch " + std::to_string(epoch));
      }
      epoch_loss += loss * m;

      b1t *= config.beta1;
      b2t *= config.beta2;
      const double step = config.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
      // same as lr * m_hat / (sqrt(v_hat) + eps) without forming m_hat, v_hat
      const double eps_hat = config.epsilon * std::sqrt(1.0 - b2t);
      for (std::size_t l = 0; l < L; ++l) {
        mw[l] = config.beta1 * mw[l] + (1.0 - config.beta1) * gw[l];
        vw[l] = config.beta2 * vw[l] + (1.0 - config.beta2) * gw[l].cwiseAbs2();
        model.weight(l).array() -= step * mw[l].array() / (vw[l].array().sqrt() + eps_hat);
        mb[l] = config.beta1 * mb[l] + (1.0 - config.beta1) * gb[l];
        vb[l] = config.beta2 * vb[l] + (1.0 - config.beta2) * gb[l].cwiseAbs2();
        model.bias(l).array() -= step * mb[l].array() / (vb[l].array().sqrt() + eps_hat);
      }
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) throw DivergedTraining("loss became non-finite");
  }

  auto& rep = result.report;
  rep.n_train = train_idx.size();
  rep.n_test = test_idx.size();
  rep.final_loss = epoch_loss;
  rep.train_mpe = mpe(model.predict(train_in), train_out);
  if (!test_idx.empty()) {
    rep.test_mpe = mpe(model.predict(subset(inputs, test_idx)), subset(outputs, test_idx));
  }
  model.metadata["train_report"] = rep.to_json();
  return result;
}

std::vector<double> mpe(const geometry::PointCloud& predictions, const geometry::PointCloud& labels) {
  if (labels.empty() || predictions.empty()) throw EmptyInput("mean percentage error of nothing");
  if (predictions.size() != labels.size() || predictions.dim() != labels.dim()) {
    throw DimensionMismatch("predictions and labels differ in shape");
  }
  std::vector<double> out(labels.dim());
  for (std::size_t i = 0; i < labels.dim(); ++i) {
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      const double y = labels[r][i];
      if (std::abs(y) < 1e-12) continue;
      sum += std::abs(predictions[r][i] - y) / std::abs(y);
      ++used;
    }
    out[i] = used ? 100.0 * sum / used : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace dspace::surrogate
