#include "dspace/dsid/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <thread>

#include "dspace/error.hpp"
#include "dspace/util/csv.hpp"
#include "dspace/util/hash.hpp"

namespace dspace::dsid {

namespace {

std::string row_key(std::span<const double> x) {
  std::string key;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) key += ',';
    key += util::format_double(x[i]);
  }
  return key;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

BenchmarkModel::BenchmarkModel(sampling::Bounds bounds, std::vector<double> center, double radius)
    : bounds_(std::move(bounds)), center_(std::move(center)), radius_(radius) {
  bounds_.validate();
  if (bounds_.dim() != 2 && bounds_.dim() != 3) throw ConfigError("benchmark model needs 2 or 3 decisions");
  if (center_.empty()) center_.assign(bounds_.dim(), 0.5);
  if (center_.size() != bounds_.dim()) throw ConfigError("benchmark center has the wrong dimension");
  if (!(radius_ > 0.0)) throw ConfigError("benchmark radius must be positive");
}

std::vector<double> BenchmarkModel::evaluate(std::span<const double> x) const {
  if (x.size() != bounds_.dim()) throw DimensionMismatch("benchmark model: wrong decision count");
  const auto z = bounds_.normalization().to_unit(x);
  double r2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) r2 += (z[i] - center_[i]) * (z[i] - center_[i]);
  const double quality = 100.0 - 50.0 * r2;
  const double throughput = z.size() == 3 ? 1.0 + z[0] + 0.5 * z[1] * z[2] : 1.0 + z[0] + 0.5 * z[1];
  return {quality, throughput};
}

bool BenchmarkModel::feasible_unit(std::span<const double> z) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) r2 += (z[i] - center_[i]) * (z[i] - center_[i]);
  return r2 <= radius_ * radius_;
}

std::string BenchmarkModel::tag() const {
  nlohmann::json j = {{"model", "benchmark"}, {"bounds", bounds_.to_json()}, {"center", center_}, {"radius", radius_}};
  return util::hex64(util::fnv1a(j.dump()));
}

DesignProblem BenchmarkModel::standard_problem(std::size_t dim, unsigned sp) {
  DesignProblem p;
  for (std::size_t i = 0; i < dim; ++i) {
    p.bounds.names.push_back("x" + std::to_string(i + 1));
    p.bounds.lower.push_back(0.0);
    p.bounds.upper.push_back(1.0);
    p.units.push_back("");
  }
  const double r = 0.35;
  p.constraints.push_back({"quality", Constraint::Direction::at_least, 100.0 - 50.0 * r * r});
  p.model.type = "benchmark";
  p.model.options = {{"center", std::vector<double>(dim, 0.5)}, {"radius", r}};
  p.sampling.sp = sp;
  p.validate();
  return p;
}

ChromaPccModel::ChromaPccModel(chromapcc::ColumnParams params, chromapcc::CycleSchedule schedule,
                               chromapcc::SimOptions options)
    : params_(std::move(params)), schedule_(schedule), options_(options) {
  params_.validate();
  schedule_.validate();
  options_.trace = false;
}

std::vector<double> ChromaPccModel::evaluate(std::span<const double> x) const {
  if (x.size() != 3) throw DimensionMismatch("chromapcc model expects (c_feed, Q_feed, T_switch)");
  const chromapcc::DecisionVector dd{x[0], x[1], x[2]};
  const auto r = chromapcc::simulate(dd, params_, schedule_, options_);
  return {r.yield, r.productivity};
}

std::string ChromaPccModel::tag() const {
  nlohmann::json j = {{"model", "chromapcc"},
                      {"params", params_.to_json()},
                      {"schedule", schedule_.to_json()},
                      {"rtol", options_.rtol},
                      {"atol", options_.atol},
                      {"css_tol", options_.css_tol},
                      {"max_cycles", options_.max_cycles}};
  return util::hex64(util::fnv1a(j.dump()));
}

TableModel::TableModel(const std::string& path, const std::vector<std::string>& decision_names) {
  const auto table = util::read_csv_file(path);
  std::vector<int> dcols;
  for (const auto& n : decision_names) {
    const int c = table.column(n);
    if (c < 0) throw ConfigError(path + ": missing decision column '" + n + "'");
    dcols.push_back(c);
  }
  std::vector<int> kcols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& h = table.header[c];
    if (h == "satisfied") continue;
    if (std::find(decision_names.begin(), decision_names.end(), h) != decision_names.end()) continue;
    kpis_.push_back(h);
    kcols.push_back(static_cast<int>(c));
  }
  if (kpis_.empty()) throw ConfigError(path + ": no KPI columns");
  std::uint64_t h = util::fnv1a(path);
  for (const auto& row : table.rows) {
    std::vector<double> x, k;
    try {
      for (int c : dcols) x.push_back(std::stod(row.at(c)));
      for (int c : kcols) k.push_back(std::stod(row.at(c)));
    } catch (const std::exception&) {
      throw ConfigError(path + ": non-numeric table entry");
    }
    const auto key = row_key(x);
    h = util::fnv1a(key + "=" + row_key(k), h);
    rows_[key] = std::move(k);
  }
  tag_ = util::hex64(h);
}

std::vector<double> TableModel::evaluate(std::span<const double> x) const {
  const auto it = rows_.find(row_key(x));
  if (it == rows_.end()) throw InvalidArgument("table model has no row for (" + row_key(x) + ")");
  return it->second;
}

BatchEvaluation evaluate_batch(const ProcessModel& model, const geometry::PointCloud& inputs, unsigned workers) {
  const std::size_t n = inputs.size();
  const std::size_t m = model.kpi_names().size();
  std::vector<double> out(n * m, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(n);
  std::vector<char> failed(n, 0);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const auto k = model.evaluate(inputs[i]);
        if (k.size() != m) throw DimensionMismatch("model returned " + std::to_string(k.size()) + " KPIs");
        std::copy(k.begin(), k.end(), out.begin() + static_cast<std::ptrdiff_t>(i * m));
      } catch (const std::exception& e) {
        failed[i] = 1;
        errors[i] = e.what();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  BatchEvaluation r;
  r.kpis = geometry::PointCloud(m, std::move(out));
  for (std::size_t i = 0; i < n; ++i) {
    if (!failed[i]) continue;
    r.failed_rows.push_back(i);
    r.messages.push_back(std::move(errors[i]));
  }
  return r;
}

std::unique_ptr<ProcessModel> make_model(const DesignProblem& problem) {
  const auto& opt = problem.model.options;
  try {
    if (problem.model.type == "benchmark") {
      const auto center = opt.value("center", std::vector<double>(problem.dim(), 0.5));
      return std::make_unique<BenchmarkModel>(problem.bounds, center, opt.value("radius", 0.35));
    }
    if (problem.model.type == "chromapcc") {
      if (problem.dim() != 3) throw ConfigError("chromapcc model needs exactly 3 decisions");
      if (!opt.contains("params")) throw ConfigError("chromapcc model needs options.params");
      auto params = chromapcc::ColumnParams::load(resolve(problem.base_dir, opt["params"].get<std::string>()));
      if (opt.contains("N")) params.N = opt["N"].get<int>();
      chromapcc::CycleSchedule schedule;
      if (opt.contains("schedule")) schedule = chromapcc::CycleSchedule::from_json(opt["schedule"]);
      chromapcc::SimOptions sim;
      if (opt.contains("sim")) {
        const auto& s = opt["sim"];
        sim.rtol = s.value("rtol", sim.rtol);
        sim.atol = s.value("atol", sim.atol);
        sim.css_tol = s.value("css_tol", sim.css_tol);
        sim.max_cycles = s.value("max_cycles", sim.max_cycles);
      }
      return std::make_unique<ChromaPccModel>(params, schedule, sim);
    }
    if (problem.model.type == "table") {
      if (!opt.contains("path")) throw ConfigError("table model needs options.path");
      return std::make_unique<TableModel>(resolve(problem.base_dir, opt["path"].get<std::string>()),
                                          problem.names());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model options: ") + e.what());
  }
  throw ConfigError("unknown model type '" + problem.model.type + "'");
}

}  // namespace dspace::dsid
