#include "dspace/cli/app.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dspace/analysis/aor.hpp"
#include "dspace/dsid/identify.hpp"
#include "dspace/dsid/labeled_cloud.hpp"
#include "dspace/dsid/model.hpp"
#include "dspace/error.hpp"
#include "dspace/sampling/sobol.hpp"
#include "dspace/surrogate/interpolator.hpp"
#include "dspace/surrogate/mlp.hpp"
#include "dspace/util/csv.hpp"
#include "dspace/util/hash.hpp"

namespace fs = std::filesystem;

namespace dspace::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct Global {
  std::string problem;
  std::string out = "out";
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool verify_extras = false;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
};

dsid::DesignProblem load_problem(const Global& g) {
  if (g.problem.empty()) throw ConfigError("--problem is required");
  return dsid::DesignProblem::load(g.problem);
}

std::string out_path(const Global& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

void ensure_out(const Global& g) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw ConfigError("cannot create output directory " + g.out + ": " + ec.message());
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Wall-clock seconds per command live apart from the results so that result
// files stay byte-identical between runs.
void record_timing(const Global& g, const std::string& command, double seconds) {
  const auto path = out_path(g, "timings.json");
  nlohmann::json j = nlohmann::json::object();
  if (fs::exists(path)) {
    try {
      j = read_json(path);
    } catch (const ConfigError&) {
      j = nlohmann::json::object();
    }
  }
  j[command] = seconds;
  write_json(path, j);
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> parse_point(const std::string& text, std::size_t dim, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + item + "' is not a number");
    }
  }
  if (v.size() != dim) {
    throw ConfigError(what + " needs " + std::to_string(dim) + " comma-separated values, got " + std::to_string(v.size()));
  }
  return v;
}

geometry::PointCloud read_samples(const std::string& path, const dsid::DesignProblem& p) {
  const auto t = util::read_csv_file(path);
  std::vector<int> cols;
  for (const auto& n : p.names()) {
    const int c = t.column(n);
    if (c < 0) throw ConfigError(path + ": missing column '" + n + "'");
    cols.push_back(c);
  }
  geometry::PointCloud x(p.dim());
  std::vector<double> row(p.dim());
  for (const auto& r : t.rows) {
    try {
      for (std::size_t i = 0; i < cols.size(); ++i) row[i] = std::stod(r.at(cols[i]));
    } catch (const std::exception&) {
      throw ConfigError(path + ": non-numeric sample");
    }
    x.push_back(row);
  }
  return x;
}

std::string row_hash(const std::string& tag, std::span<const double> x) {
  std::string key = tag;
  for (double v : x) key += '|' + util::format_double(v);
  return util::hex64(util::fnv1a(key));
}

std::unique_ptr<surrogate::Interpolator> model_interpolator(std::shared_ptr<dsid::ProcessModel> model) {
  const auto n = model->kpi_names().size();
  return std::make_unique<surrogate::FunctionInterpolator>(
      [model](std::span<const double> x) { return model->evaluate(x); }, n);
}

surrogate::TrainResult train_on(const dsid::LabeledCloud& cloud, const surrogate::TrainConfig& cfg) {
  auto r = surrogate::train(cloud.decisions, cloud.kpis, cfg);
  r.model.input_names = cloud.decision_names;
  r.model.output_names = cloud.kpi_names;
  return r;
}

std::unique_ptr<surrogate::Interpolator> make_interpolator(const std::string& kind, const Global& g,
                                                           const dsid::DesignProblem& problem,
                                                           const dsid::LabeledCloud& cloud, Io io) {
  if (kind == "linear") return std::make_unique<surrogate::LinearInterpolator>(cloud.decisions, cloud.kpis);
  if (kind == "model") return model_interpolator(dsid::make_model(problem));
  const auto path = out_path(g, "surrogate.json");
  if (!fs::exists(path)) {
    io.out << "no surrogate.json; training one with default settings\n";
    surrogate::TrainConfig cfg;
    cfg.seed = g.seed;
    train_on(cloud, cfg).model.save(path);
  }
  auto model = surrogate::MlpModel::load(path);
  if (model.input_names != cloud.decision_names || model.output_names != cloud.kpi_names) {
    throw ConfigError(path + " was trained on different decisions or KPIs");
  }
  std::vector<double> mpe;
  if (model.metadata.contains("train_report")) {
    for (const auto& v : model.metadata["train_report"].value("test_mpe", nlohmann::json::array())) {
      mpe.push_back(v.is_null() ? std::nan("") : v.get<double>());
    }
  }
  return std::make_unique<surrogate::MlpInterpolator>(std::move(model), mpe);
}

// ---- commands -----------------------------------------------------------------

struct SampleArgs {
  int sp = -1;
};

void cmd_sample(const Global& g, const SampleArgs& a, Io io) {
  const auto t0 = Clock::now();
  const auto p = load_problem(g);
  ensure_out(g);
  const unsigned sp = a.sp >= 0 ? static_cast<unsigned>(a.sp) : p.sampling.sp;
  const auto batch = sampling::sobol(p.dim(), p.bounds, sp, p.sampling.skip_zero);
  const auto path = out_path(g, "samples.csv");
  sampling::write_csv(path, batch);
  io.out << batch.inputs.size() << " samples written to " << path << '\n';
  record_timing(g, "sample", since(t0));
}

struct RunArgs {
  double max_failure_fraction = 0.05;
  std::size_t chunk = 64;
};

void cmd_run(const Global& g, const RunArgs& a, Io io) {
  const auto t0 = Clock::now();
  const auto p = load_problem(g);
  ensure_out(g);
  const auto model = dsid::make_model(p);
  p.check_kpis(model->kpi_names());
  const auto kpi_names = model->kpi_names();
  const std::size_t m = kpi_names.size();

  const auto samples_path = out_path(g, "samples.csv");
  geometry::PointCloud x;
  if (fs::exists(samples_path)) {
    x = read_samples(samples_path, p);
  } else {
    const auto batch = sampling::sobol(p.dim(), p.bounds, p.sampling.sp, p.sampling.skip_zero);
    sampling::write_csv(samples_path, batch);
    x = batch.inputs;
  }

  // resume cache: one line per successfully evaluated row, keyed by content
  const auto cache_path = out_path(g, "run_cache.csv");
  const auto tag = model->tag();
  std::map<std::string, std::vector<double>> cache;
  if (fs::exists(cache_path)) {
    std::ifstream in(cache_path);
    std::string line;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string key, item;
      std::getline(ss, key, ',');
      std::vector<double> k;
      try {
        while (std::getline(ss, item, ',')) k.push_back(std::stod(item));
      } catch (const std::exception&) {
        continue;  // torn line from an interrupted write
      }
      if (k.size() == m) cache[key] = std::move(k);
    }
  }

  std::vector<std::string> keys(x.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < x.size(); ++i) {
    keys[i] = row_hash(tag, x[i]);
    if (!cache.count(keys[i])) pending.push_back(i);
  }
  const std::size_t cached = x.size() - pending.size();

  std::map<std::size_t, std::string> failures;
  {
    std::ofstream cache_out(cache_path, std::ios::app);
    const std::size_t chunk = std::max<std::size_t>(a.chunk, 1) * std::max(1u, g.workers);
    for (std::size_t start = 0; start < pending.size(); start += chunk) {
      const std::size_t end = std::min(pending.size(), start + chunk);
      geometry::PointCloud batch(p.dim());
      for (std::size_t i = start; i < end; ++i) batch.push_back(x[pending[i]]);
      const auto r = dsid::evaluate_batch(*model, batch, g.workers);
      std::size_t f = 0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto row = pending[start + i];
        if (f < r.failed_rows.size() && r.failed_rows[f] == i) {
          failures[row] = r.messages[f++];
          continue;
        }
        std::vector<std::string> fields{keys[row]};
        for (double v : r.kpis[i]) fields.push_back(util::format_double(v));
        util::write_csv_row(cache_out, fields);
        cache[keys[row]].assign(r.kpis[i].begin(), r.kpis[i].end());
      }
      cache_out.flush();
    }
  }

  geometry::PointCloud decisions(p.dim()), kpis(m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (failures.count(i)) continue;
    decisions.push_back(x[i]);
    kpis.push_back(cache.at(keys[i]));
  }
  const auto cloud = dsid::classify(decisions, kpis, kpi_names, p);
  dsid::write_cloud_csv(out_path(g, "cloud.csv"), cloud);
  {
    std::ofstream f(out_path(g, "failures.csv"));
    std::vector<std::string> header{"row"};
    header.insert(header.end(), p.names().begin(), p.names().end());
    header.push_back("message");
    util::write_csv_row(f, header);
    for (const auto& [row, msg] : failures) {
      std::vector<std::string> fields{std::to_string(row)};
      for (double v : x[row]) fields.push_back(util::format_double(v));
      fields.push_back(msg);
      util::write_csv_row(f, fields);
    }
  }
  io.out << x.size() << " rows: " << pending.size() << " evaluated, " << cached << " cached, " << failures.size()
         << " failed; " << cloud.n_sat() << " satisfied, " << cloud.n_vio() << " violated\n";
  record_timing(g, "run", since(t0));
  if (!x.empty() && static_cast<double>(failures.size()) > a.max_failure_fraction * static_cast<double>(x.size())) {
    throw ModelFailure(std::to_string(failures.size()) + " of " + std::to_string(x.size()) +
                       " model evaluations failed (see failures.csv)");
  }
}

struct TrainArgs {
  surrogate::TrainConfig cfg;
  std::string activation = "relu";
};

void cmd_train(const Global& g, TrainArgs a, Io io) {
  const auto t0 = Clock::now();
  const auto p = load_problem(g);
  ensure_out(g);
  const auto cloud = dsid::read_cloud_csv(out_path(g, "cloud.csv"), p);
  a.cfg.activation = surrogate::activation_from_string(a.activation);
  a.cfg.seed = g.seed;
  const auto r = train_on(cloud, a.cfg);
  r.model.save(out_path(g, "surrogate.json"));
  io.out << "trained on " << r.report.n_train << " rows, tested on " << r.report.n_test << '\n';
  for (std::size_t k = 0; k < cloud.kpi_names.size(); ++k) {
    io.out << "  test MPE " << cloud.kpi_names[k] << ": " << r.report.test_mpe[k] << " %\n";
  }
  record_timing(g, "train-surrogate", since(t0));
}

struct IdentifyArgs {
  std::string method;
  std::string interpolator = "mlp";
  dsid::IdentifyOptions opts;
};

void print_summary(std::ostream& out, const dsid::DesignSpaceResult& r, double seconds) {
  const auto flags = out.flags();
  out << std::left << std::setprecision(6);
  out << std::setw(24) << "method" << r.method << '\n'
      << std::setw(24) << "v_max %" << r.v_max_pct << '\n'
      << std::setw(24) << "regions" << r.n_regions << '\n'
      << std::setw(24) << "alpha radius" << r.alpha_radius << '\n'
      << std::setw(24) << "satisfied points used" << r.n_sat_used << '\n'
      << std::setw(24) << "violated inside" << r.n_vio_inside << " of " << r.n_vio << '\n';
  if (r.extra_power >= 0) {
    out << std::setw(24) << "extra points" << r.extra_points << " (2^" << r.extra_power << "), " << r.extra_sat
        << " satisfied\n";
  }
  out << std::setw(24) << "size" << r.size_physical << ' ' << r.size_unit << '\n'
      << std::setw(24) << "normalized size" << r.size_normalized << '\n'
      << std::setw(24) << "time s" << seconds << '\n';
  for (const auto& v : r.violations) {
    out << "  violated row " << v.row << ':';
    for (double d : v.decisions) out << ' ' << d;
    out << "  shortfall %";
    for (double pct : v.violation_percent) out << ' ' << pct;
    out << '\n';
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  out.flags(flags);
}

void cmd_identify(const Global& g, IdentifyArgs a, Io io) {
  const auto t0 = Clock::now();
  const auto p = load_problem(g);
  ensure_out(g);
  const auto cloud = dsid::read_cloud_csv(out_path(g, "cloud.csv"), p);
  a.opts.seed = g.seed;
  std::shared_ptr<dsid::ProcessModel> audit;
  if (g.verify_extras) {
    audit = dsid::make_model(p);
    a.opts.audit_model = audit.get();
  }
  dsid::DesignSpaceResult r;
  if (a.method == "tolerance") {
    r = dsid::identify_tolerance(cloud, p, a.opts);
  } else {
    const auto interp = make_interpolator(a.interpolator, g, p, cloud, io);
    r = a.method == "rs" ? dsid::identify_resolution_support(cloud, p, *interp, a.opts)
                         : dsid::identify_combinatorial(cloud, p, *interp, a.opts);
  }
  const auto seconds = since(t0);
  write_json(out_path(g, "dsp_" + a.method + ".json"), r.to_json(false));
  print_summary(io.out, r, seconds);
  record_timing(g, "identify_" + a.method, seconds);
}

struct AorArgs {
  std::string dsp;
  std::string nop;
  std::string nop_b;
  std::string interpolator = "none";
  unsigned support_power = 12;
  std::string name;
  analysis::AorOptions aor;
};

dsid::DesignSpaceResult load_space(const Global& g, const AorArgs& a) {
  const auto path = a.dsp.empty() ? out_path(g, "dsp_tolerance.json") : a.dsp;
  return dsid::DesignSpaceResult::from_json(read_json(path));
}

void cmd_aor(const Global& g, const AorArgs& a, Io io) {
  const auto t0 = Clock::now();
  const auto p = load_problem(g);
  ensure_out(g);
  const auto space = load_space(g, a);
  auto r = analysis::find_aor(space, parse_point(a.nop, p.dim(), "--nop"), a.aor);
  r.decision_names = p.names();
  const auto cloud_path = out_path(g, "cloud.csv");
  if (fs::exists(cloud_path)) {
    const auto cloud = dsid::read_cloud_csv(cloud_path, p);
    std::unique_ptr<surrogate::Interpolator> interp;
    if (a.interpolator != "none") interp = make_interpolator(a.interpolator, g, p, cloud, io);
    try {
      r.stats = analysis::kpi_stats(r.region(), cloud, interp.get(), a.support_power);
    } catch (const EmptyRegion&) {
      r.warnings.push_back("no samples inside the AOR; KPI statistics omitted");
    }
  }
  write_json(out_path(g, (a.name.empty() ? "aor" : a.name) + ".json"), r.to_json());
  analysis::write_text(io.out, r);
  record_timing(g, "aor", since(t0));
}

void cmd_compare(const Global& g, const AorArgs& a, Io io) {
  const auto t0 = Clock::now();
  const auto p = load_problem(g);
  ensure_out(g);
  const auto space = load_space(g, a);
  const auto cloud = dsid::read_cloud_csv(out_path(g, "cloud.csv"), p);
  std::unique_ptr<surrogate::Interpolator> interp;
  if (a.interpolator != "none") interp = make_interpolator(a.interpolator, g, p, cloud, io);
  auto c = analysis::compare_nops(space, parse_point(a.nop, p.dim(), "--nop-a"), parse_point(a.nop_b, p.dim(), "--nop-b"),
                                  cloud, interp.get(), a.aor, a.support_power);
  c.a.decision_names = c.b.decision_names = p.names();
  write_json(out_path(g, (a.name.empty() ? "compare" : a.name) + ".json"), c.to_json());
  analysis::write_text(io.out, c);
  record_timing(g, "compare", since(t0));
}

void cmd_report(const Global& g, Io io) {
  const auto p = load_problem(g);
  ensure_out(g);
  const fs::path dir = fs::path(g.out) / "report";
  fs::create_directories(dir);

  nlohmann::json artifacts = nlohmann::json::array();
  auto add = [&](const std::string& kind, const std::string& file, int schema) {
    artifacts.push_back({{"kind", kind}, {"path", file}, {"schema_version", schema}});
  };
  write_json((dir / "problem.json").string(), p.to_json());
  add("problem", "problem.json", kProblemSchema);

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(g.out)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto name = f.filename().string();
    std::string kind;
    int schema = 1;
    if (name == "samples.csv") {
      kind = "samples";
    } else if (name == "cloud.csv") {
      kind = "cloud";
      schema = kCloudSchema;
    } else if (name == "failures.csv") {
      kind = "failures";
    } else if (name == "surrogate.json") {
      kind = "surrogate";
      schema = kSurrogateSchema;
    } else if (name.rfind("dsp_", 0) == 0 && f.extension() == ".json") {
      kind = "design_space";
      schema = kDesignSpaceSchema;
    } else if (name.rfind("aor", 0) == 0 && f.extension() == ".json") {
      kind = "aor";
      schema = kAorSchema;
    } else if (name.rfind("compare", 0) == 0 && f.extension() == ".json") {
      kind = "comparison";
      schema = kComparisonSchema;
    } else {
      continue;
    }
    fs::copy_file(f, dir / name, fs::copy_options::overwrite_existing);
    add(kind, name, schema);
  }
  const auto hash = util::hex64(util::fnv1a(p.to_json().dump() + "|seed=" + std::to_string(g.seed)));
  const nlohmann::json manifest = {{"schema_version", 1},
                                   {"config_hash", hash},
                                   {"decisions", p.names()},
                                   {"units", p.units},
                                   {"artifacts", artifacts}};
  write_json((dir / "manifest.json").string(), manifest);
  io.out << artifacts.size() << " artifacts bundled in " << dir.string() << '\n';
}

int code_for(const std::exception& e) {
  if (dynamic_cast<const NopOutsideSpace*>(&e)) return kNopOutside;
  if (dynamic_cast<const NoUnifiedShape*>(&e) || dynamic_cast<const BracketInvalid*>(&e) ||
      dynamic_cast<const EmptyShape*>(&e)) {
    return kNoUnifiedShape;
  }
  if (dynamic_cast<const ModelFailure*>(&e) || dynamic_cast<const IntegrationFailure*>(&e) ||
      dynamic_cast<const SaturationSingularity*>(&e) || dynamic_cast<const DivergedTraining*>(&e)) {
    return kModelFailure;
  }
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidBounds*>(&e) ||
      dynamic_cast<const MissingKpi*>(&e) || dynamic_cast<const DimensionMismatch*>(&e) ||
      dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const EmptyInput*>(&e) ||
      dynamic_cast<const DegenerateInput*>(&e)) {
    return kConfig;
  }
  return kInternal;
}

}  // namespace

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design-space identification and flexibility analysis", "dspace"};
  app.fallthrough();
  app.require_subcommand(1);
  Global g;
  app.add_option("--problem", g.problem, "Problem definition JSON");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for training and audits")->capture_default_str();
  app.add_option("--workers", g.workers, "Model evaluation threads (0 = all cores)")->capture_default_str();
  app.add_flag("--verify-extras", g.verify_extras, "Re-simulate 5% of the predicted-satisfied extra points");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Write the Sobol design to samples.csv");
  sample->add_option("--sp", sa.sp, "Override the sample power (2^sp rows)")->check(CLI::Range(0, 24));

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Evaluate the model on samples.csv and write cloud.csv");
  run->add_option("--max-failure-fraction", ra.max_failure_fraction, "Allowed share of failed rows")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  TrainArgs ta;
  auto* train = app.add_subcommand("train-surrogate", "Train the MLP surrogate on cloud.csv");
  std::string hidden = "64,64,64";
  train->add_option("--epochs", ta.cfg.epochs)->capture_default_str();
  train->add_option("--lr", ta.cfg.learning_rate)->capture_default_str();
  train->add_option("--batch", ta.cfg.batch_size)->capture_default_str();
  train->add_option("--hidden", hidden, "Comma-separated hidden layer widths")->capture_default_str();
  train->add_option("--activation", ta.activation)->check(CLI::IsMember({"relu", "tanh"}))->capture_default_str();

  IdentifyArgs ia;
  auto* identify = app.add_subcommand("identify", "Identify the design space and write dsp_<method>.json");
  identify->add_option("--method", ia.method)->required()->check(CLI::IsMember({"tolerance", "rs", "comb"}));
  identify->add_option("--interpolator", ia.interpolator, "Predictor for extra points")
      ->check(CLI::IsMember({"mlp", "linear", "model"}))
      ->capture_default_str();
  identify->add_option("--tolerance-step", ia.opts.tolerance_step)->capture_default_str();
  identify->add_option("--tolerance-cap", ia.opts.tolerance_cap)->capture_default_str();
  identify->add_option("--comb-v-max", ia.opts.comb_v_max)->capture_default_str();
  identify->add_option("--start-power", ia.opts.start_power)->capture_default_str();
  identify->add_option("--max-power", ia.opts.max_power)->capture_default_str();

  AorArgs aa;
  auto* aor = app.add_subcommand("aor", "Acceptable operating region around a NOP");
  aor->add_option("--dsp", aa.dsp, "Design space JSON (default <out>/dsp_tolerance.json)");
  aor->add_option("--nop", aa.nop, "Comma-separated decision values")->required();
  aor->add_option("--name", aa.name, "Output file stem (default aor)");

  AorArgs ca;
  auto* compare = app.add_subcommand("compare", "Compare the AORs of two NOPs");
  compare->add_option("--dsp", ca.dsp, "Design space JSON (default <out>/dsp_tolerance.json)");
  compare->add_option("--nop-a", ca.nop)->required();
  compare->add_option("--nop-b", ca.nop_b)->required();
  compare->add_option("--name", ca.name, "Output file stem (default compare)");

  for (auto [cmd, args] : {std::pair{aor, &aa}, std::pair{compare, &ca}}) {
    cmd->add_option("--interpolator", args->interpolator, "Densify KPI statistics with predictions")
        ->check(CLI::IsMember({"none", "mlp", "linear", "model"}))
        ->capture_default_str();
    cmd->add_option("--support-power", args->support_power)->check(CLI::Range(1, 20))->capture_default_str();
    cmd->add_option("--aor-tol", args->aor.tol)->capture_default_str();
  }

  auto* report = app.add_subcommand("report", "Bundle artifacts and a manifest into <out>/report");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Io io{out, err};
  try {
    if (*sample) cmd_sample(g, sa, io);
    if (*run) cmd_run(g, ra, io);
    if (*train) {
      ta.cfg.hidden.clear();
      for (double w : parse_point(hidden, std::count(hidden.begin(), hidden.end(), ',') + 1, "--hidden")) {
        ta.cfg.hidden.push_back(static_cast<int>(w));
      }
      cmd_train(g, ta, io);
    }
    if (*identify) cmd_identify(g, ia, io);
    if (*aor) cmd_aor(g, aa, io);
    if (*compare) cmd_compare(g, ca, io);
    if (*report) cmd_report(g, io);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return code_for(e);
  }
  return kOk;
}

}  // namespace dspace::cli
