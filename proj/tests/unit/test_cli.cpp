#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dspace/analysis/aor.hpp"
#include "dspace/cli/app.hpp"
#include "dspace/dsid/identify.hpp"
#include "dspace/util/csv.hpp"

namespace fs = std::filesystem;
using namespace dspace;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result dspace_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dspace_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

const std::string kBenchmark = std::string(DSPACE_SOURCE_DIR) + "/params/benchmark_problem.json";

// Two discs of radius 0.18 joined by nothing: a 2D table problem whose
// zero-tolerance shape has two regions. `drop` rows are left out of the table.
fs::path two_disc_problem(const fs::path& dir, std::size_t drop = 0) {
  const auto problem = dir / "problem.json";
  nlohmann::json p = {
      {"decisions", {{{"name", "x1"}, {"unit", "m"}}, {{"name", "x2"}, {"unit", "s"}}}},
      {"bounds", {{{"name", "x1"}, {"lower", 0.0}, {"upper", 1.0}}, {{"name", "x2"}, {"lower", 0.0}, {"upper", 1.0}}}},
      {"constraints", {{{"kpi", "g"}, {"op", ">="}, {"threshold", 0.5}}}},
      {"model", {{"type", "table"}, {"options", {{"path", "table.csv"}}}}},
      {"sampling", {{"sp", 8}}}};
  std::ofstream(problem) << p.dump(2);
  const auto out = (dir / "out").string();
  REQUIRE(dspace_cli({"--problem", problem.string(), "--out", out, "sample"}).code == 0);
  const auto samples = util::read_csv_file(out + "/samples.csv");
  std::ofstream table(dir / "table.csv");
  util::write_csv_row(table, {"x1", "x2", "g"});
  for (std::size_t i = 0; i + drop < samples.rows.size(); ++i) {
    const auto& r = samples.rows[i];
    const double x = std::stod(r[0]), y = std::stod(r[1]);
    auto in = [&](double cx) { return (x - cx) * (x - cx) + (y - 0.5) * (y - 0.5) <= 0.18 * 0.18; };
    util::write_csv_row(table, {r[0], r[1], in(0.25) || in(0.75) ? "1" : "0"});
  }
  return problem;
}

}  // namespace

TEST_CASE("sample writes 2^sp rows") {
  const auto dir = fresh_dir("sample");
  for (int sp : {1, 9, 12}) {
    const auto r = dspace_cli({"--problem", kBenchmark, "--out", dir.string(), "sample", "--sp", std::to_string(sp)});
    REQUIRE(r.code == 0);
    const auto t = util::read_csv_file((dir / "samples.csv").string());
    CHECK(t.rows.size() == (std::size_t{1} << sp));
    CHECK(t.header == std::vector<std::string>{"x1", "x2", "x3"});
  }
}

TEST_CASE("benchmark run: speed, labels and resume") {
  const auto dir = fresh_dir("run");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = dspace_cli({"--problem", kBenchmark, "--out", dir.string(), "run"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(r.code == 0);
  CHECK(seconds < 10.0);

  const auto cloud = util::read_csv_file((dir / "cloud.csv").string());
  REQUIRE(cloud.rows.size() == 4096);
  const auto x1 = cloud.numeric_column("x1"), x2 = cloud.numeric_column("x2"), x3 = cloud.numeric_column("x3");
  const auto sat = cloud.numeric_column("satisfied");
  std::size_t agree = 0, n_sat = 0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const double d2 = (x1[i] - 0.5) * (x1[i] - 0.5) + (x2[i] - 0.5) * (x2[i] - 0.5) + (x3[i] - 0.5) * (x3[i] - 0.5);
    const bool inside = d2 <= 0.35 * 0.35;
    agree += inside == (sat[i] == 1.0);
    n_sat += inside;
  }
  CHECK(agree == 4096);
  // the ball fills 4/3 pi 0.35^3 = 0.1796 of the cube
  CHECK(std::abs(static_cast<double>(n_sat) / 4096.0 - 0.1796) < 0.01);

  // interrupted run: keep part of the cache plus a torn final line
  const auto full = slurp(dir / "cloud.csv");
  std::ifstream in(dir / "run_cache.csv");
  std::string line, kept;
  for (int i = 0; i < 1000 && std::getline(in, line); ++i) kept += line + "\n";
  in.close();
  std::ofstream(dir / "run_cache.csv", std::ios::trunc) << kept << "deadbeef,9";
  fs::remove(dir / "cloud.csv");
  const auto again = dspace_cli({"--problem", kBenchmark, "--out", dir.string(), "run"});
  REQUIRE(again.code == 0);
  CHECK(again.out.find("3096 evaluated, 1000 cached") != std::string::npos);
  CHECK(slurp(dir / "cloud.csv") == full);
}

TEST_CASE("run with zero samples") {
  const auto dir = fresh_dir("empty");
  std::ofstream(dir / "samples.csv") << "x1,x2,x3\n";
  const auto r = dspace_cli({"--problem", kBenchmark, "--out", dir.string(), "run"});
  CHECK(r.code == cli::kOk);
  const auto cloud = util::read_csv_file((dir / "cloud.csv").string());
  CHECK(cloud.rows.empty());
  CHECK(cloud.header.back() == "satisfied");
  CHECK(util::read_csv_file((dir / "failures.csv").string()).rows.empty());
}

TEST_CASE("model failures and exit codes") {
  const auto dir = fresh_dir("failures");
  const auto problem = two_disc_problem(dir, 1).string();
  const auto out = (dir / "out").string();

  auto strict = dspace_cli({"--problem", problem, "--out", out, "run", "--max-failure-fraction", "0.001"});
  CHECK(strict.code == cli::kModelFailure);
  auto lenient = dspace_cli({"--problem", problem, "--out", out, "run"});
  CHECK(lenient.code == cli::kOk);
  const auto failures = util::read_csv_file(out + "/failures.csv");
  REQUIRE(failures.rows.size() == 1);
  CHECK(failures.rows[0][0] == "255");
  CHECK(failures.header.back() == "message");
  CHECK(util::read_csv_file(out + "/cloud.csv").rows.size() == 255);

  // two separate discs cannot be unified without tolerance
  auto split = dspace_cli({"--problem", problem, "--out", out, "identify", "--method", "tolerance", "--tolerance-cap", "0"});
  CHECK(split.code == cli::kNoUnifiedShape);

  CHECK(dspace_cli({"--out", out, "run"}).code == cli::kConfig);
  CHECK(dspace_cli({"--problem", (dir / "missing.json").string(), "run"}).code == cli::kConfig);
  CHECK(dspace_cli({"--problem", problem, "--out", out, "frobnicate"}).code == cli::kUsage);
  CHECK(dspace_cli({"--problem", problem, "--out", out}).code == cli::kUsage);
  CHECK(dspace_cli({"--problem", problem, "--out", out, "identify", "--method", "bogus"}).code == cli::kUsage);
  CHECK(dspace_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("identify, AOR, compare and report") {
  const auto dir = fresh_dir("pipeline");
  const std::vector<std::string> g = {"--problem", kBenchmark, "--out", dir.string()};
  auto with = [&](std::vector<std::string> extra) {
    auto args = g;
    args.insert(args.end(), extra.begin(), extra.end());
    return dspace_cli(args);
  };
  REQUIRE(with({"run"}).code == 0);
  const auto tol = with({"identify", "--method", "tolerance"});
  REQUIRE(tol.code == 0);
  CHECK(tol.out.find("regions                 1") != std::string::npos);

  const auto dsp = read_json(dir / "dsp_tolerance.json");
  CHECK(dsp["schema_version"] == 1);
  CHECK_FALSE(dsp.contains("seconds"));
  CHECK(dsid::DesignSpaceResult::from_json(dsp).to_json(false) == dsp);

  REQUIRE(with({"train-surrogate", "--epochs", "3", "--hidden", "8,8"}).code == 0);
  const auto model = read_json(dir / "surrogate.json");
  CHECK(model["input_names"] == nlohmann::json({"x1", "x2", "x3"}));
  REQUIRE(with({"identify", "--method", "comb", "--interpolator", "linear", "--start-power", "10"}).code == 0);
  CHECK(read_json(dir / "dsp_comb.json")["method"] == "combinatorial");

  auto aor = with({"aor", "--nop", "0.5,0.5,0.5"});
  REQUIRE(aor.code == 0);
  const auto report = analysis::AorReport::from_json(read_json(dir / "aor.json"));
  CHECK(report.half_width > 0.15);
  REQUIRE(report.stats.has_value());
  CHECK(report.stats->n_truth > 0);
  CHECK(report.decision_names == std::vector<std::string>{"x1", "x2", "x3"});

  CHECK(with({"aor", "--nop", "0.05,0.05,0.05"}).code == cli::kNopOutside);
  CHECK(with({"aor", "--nop", "0.5,0.5"}).code == cli::kConfig);
  CHECK(with({"aor", "--nop", "0.5,x,0.5"}).code == cli::kConfig);

  REQUIRE(with({"compare", "--nop-a", "0.5,0.5,0.5", "--nop-b", "0.5,0.5,0.5"}).code == 0);
  const auto cmp = read_json(dir / "compare.json");
  CHECK(cmp["aor_size_delta_pct"] == 0.0);
  for (const auto& v : cmp["mpar_delta_pct"]) CHECK(v == 0.0);
  for (const auto& v : cmp["kpi_mean_delta_pct"]) CHECK(v == 0.0);

  REQUIRE(with({"report"}).code == 0);
  const auto manifest = read_json(dir / "report" / "manifest.json");
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  std::set<std::string> kinds;
  for (const auto& a : manifest["artifacts"]) {
    kinds.insert(a["kind"].get<std::string>());
    CHECK(fs::exists(dir / "report" / a["path"].get<std::string>()));
  }
  for (const char* k : {"problem", "samples", "cloud", "failures", "surrogate", "design_space", "aor", "comparison"}) {
    CHECK(kinds.count(k) == 1);
  }
  CHECK(read_json(dir / "timings.json").contains("identify_tolerance"));
}

TEST_CASE("pipeline output is deterministic") {
  auto pipeline = [](const fs::path& dir) {
    const std::vector<std::string> g = {"--problem", kBenchmark, "--out", dir.string(), "--seed", "7"};
    for (std::vector<std::string> cmd : {std::vector<std::string>{"sample", "--sp", "10"},
                                         {"run"},
                                         {"train-surrogate", "--epochs", "4", "--hidden", "8"},
                                         {"identify", "--method", "tolerance"},
                                         {"identify", "--method", "rs", "--start-power", "10"},
                                         {"aor", "--nop", "0.5,0.5,0.5", "--interpolator", "mlp"},
                                         {"compare", "--nop-a", "0.5,0.5,0.5", "--nop-b", "0.55,0.5,0.5"},
                                         {"report"}}) {
      auto args = g;
      args.insert(args.end(), cmd.begin(), cmd.end());
      REQUIRE(dspace_cli(args).code == 0);
    }
  };
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  pipeline(a);
  pipeline(b);
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename().string();
    if (!e.is_regular_file() || name == "timings.json") continue;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / name), name);
    ++compared;
  }
  CHECK(compared >= 9);
  CHECK(slurp(a / "report" / "manifest.json") == slurp(b / "report" / "manifest.json"));
}
