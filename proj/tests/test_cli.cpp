#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tdfr/cli.hpp"
#include "tdfr/errors.hpp"
#include "tdfr/spacetime.hpp"

using namespace tdfr;
using namespace tdfr::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TDFR_TEST_DATA_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("tdfr_test_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tdfr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

RunManifest manifest(std::vector<fs::path> scenarios, const fs::path& out) {
  RunManifest m;
  m.scenarios = std::move(scenarios);
  m.out_dir = out;
  m.timestamp = "2000-01-01T00:00:00Z";
  return m;
}

}  // namespace

TEST_CASE("sweep specification") {
  const SweepSpec s = parse_sweep("alpha=0.8:1.2:5");
  CHECK(s.parameter == "alpha");
  CHECK(s.count == 5);
  const auto g = s.grid();
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.8);
  CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.back() == 1.2);

  const auto two = parse_sweep("c=1:1e6:2").grid();
  CHECK(two == std::vector<double>{1.0, 1e6});

  CHECK_THROWS_AS(parse_sweep("alpha=0.8:1.2:1"), ValidationError);
  CHECK_THROWS_AS(parse_sweep("mass=1:2:3"), ValidationError);
  CHECK_THROWS_AS(parse_sweep("alpha=0.8:1.2"), ValidationError);
  CHECK_THROWS_AS(parse_sweep("alpha"), ValidationError);
  CHECK_THROWS_AS(parse_sweep("alpha=a:1:3"), ValidationError);
  CHECK_THROWS_AS(parse_sweep("alpha=0:1:-3"), ValidationError);
}

TEST_CASE("run writes reports") {
  TempDir dir("run");
  std::ostringstream out, err;
  const int rc = cmd_run(manifest({kData / "comoving.json", kData / "oscillator_blue.json"}, dir.path), out, err);
  CHECK(rc == 0);
  CHECK(err.str().empty());

  const auto comoving = read_csv(dir.path / "comoving.csv");
  REQUIRE(comoving.size() == 2);
  CHECK(comoving[0].size() == 14);
  CHECK(comoving[1][8] == "1");  // lhs
  CHECK(comoving[1][9] == "1");  // rhs

  const auto osc = read_csv(dir.path / "oscillator_blue.csv");
  REQUIRE(osc.size() == 2);
  CHECK(std::stod(osc[1][4]) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(std::abs(2.0 * std::stod(osc[1][7]) - 0.25031350734645631) < 1e-10);
  CHECK(std::abs(2.0 * std::stod(osc[1][6]) - 0.26260705709986626) < 1e-10);
  CHECK(std::abs(std::stod(osc[1][10])) < 1e-12);

  CHECK(fs::exists(dir.path / "oscillator_blue_atoms.csv"));
  CHECK(fs::exists(dir.path / "oscillator_blue_mc.csv"));
  CHECK_FALSE(fs::exists(dir.path / "comoving_mc.csv"));

  const auto m = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  CHECK(m["version"] == version());
  CHECK(m["timestamp"] == "2000-01-01T00:00:00Z");
  CHECK(m["outputs"].size() == 5);

  CHECK(out.str().find("comoving residual=0 entropy_production=0\n") != std::string::npos);
  CHECK(out.str().find("oscillator_blue residual=") != std::string::npos);
}

TEST_CASE("run output is byte-identical across runs") {
  TempDir a("bytes_a");
  TempDir b("bytes_b");
  std::ostringstream out, err;
  for (const auto& d : {a.path, b.path}) {
    RunManifest m = manifest({kData / "oscillator_blue.json", kData / "quench_schedule.json"}, d);
    m.quiet = true;
    REQUIRE(cmd_run(m, out, err) == 0);
  }
  CHECK(out.str().empty());
  for (const char* f : {"oscillator_blue.csv", "oscillator_blue_atoms.csv", "oscillator_blue_mc.csv",
                        "quench_schedule.csv", "manifest.json"}) {
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
}

TEST_CASE("run overrides") {
  TempDir dir("overrides");
  std::ostringstream out, err;
  RunManifest m = manifest({kData / "oscillator_blue.json", kData / "quench_schedule.json"}, dir.path);
  m.seed = 99;
  m.steps = 50;
  m.format = Format::Json;
  REQUIRE(cmd_run(m, out, err) == 0);
  CHECK(slurp(dir.path / "oscillator_blue_mc.csv").find("\n100000,99,") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir.path / "quench_schedule.json"));
  CHECK(j["steps"] == 50);
  CHECK(j["final_basis"] == "instantaneous");
  CHECK(nlohmann::json::parse(slurp(dir.path / "oscillator_blue.json"))["steps"] == 0);
}

TEST_CASE("run error paths") {
  TempDir dir("errors");
  fs::create_directories(dir.path);
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << R"({"scenario_id": "x", "pipeline": "dilated", "beta": tru })";
  std::ostringstream out, err;
  CHECK(cmd_run(manifest({bad}, dir.path / "out"), out, err) == 2);
  CHECK(err.str().find("beta: malformed JSON") != std::string::npos);

  std::ostringstream out2, err2;
  CHECK(cmd_run(manifest({dir.path / "absent.json"}, dir.path / "out"), out2, err2) == 3);

  std::ostringstream out3, err3;
  const fs::path blocker = dir.path / "file";
  std::ofstream(blocker) << "x";
  CHECK(cmd_run(manifest({kData / "comoving.json"}, blocker / "sub"), out3, err3) == 3);

  // A valid scenario still runs when another one fails.
  std::ostringstream out4, err4;
  CHECK(cmd_run(manifest({bad, kData / "comoving.json"}, dir.path / "mixed"), out4, err4) == 2);
  CHECK(fs::exists(dir.path / "mixed" / "comoving.csv"));

  std::ostringstream out5, err5;
  CHECK(cmd_run(manifest({kData / "comoving.json", kData / "comoving.json"}, dir.path / "dup"), out5, err5) == 2);
  CHECK(err5.str().find("already used") != std::string::npos);
}

TEST_CASE("sweeps") {
  TempDir dir("sweep");
  std::ostringstream out, err;

  SUBCASE("alpha across the comoving point") {
    RunManifest m = manifest({kData / "oscillator_blue.json"}, dir.path);
    m.sweep = parse_sweep("alpha=0.8:1.2:5");
    REQUIRE(cmd_sweep(m, out, err) == 0);
    const auto rows = read_csv(dir.path / "oscillator_blue_sweep_alpha.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[1][0] == "oscillator_blue@alpha=0.8");
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].size() == 14);
    CHECK(std::stod(rows[1][7]) < 0.0);
    CHECK(std::stod(rows[2][7]) < 0.0);
    CHECK(std::stod(rows[3][7]) == 0.0);
    CHECK(std::stod(rows[4][7]) > 0.0);
    CHECK(std::stod(rows[5][7]) > 0.0);
  }
  SUBCASE("c towards the Newtonian limit") {
    const fs::path scenario = dir.path / "moving.json";
    fs::create_directories(dir.path);
    std::ofstream(scenario) << R"({"scenario_id": "moving", "pipeline": "dilated", "beta": 1,
      "system": {"type": "harmonic", "omega": 1},
      "worldline": {"preset": "ramp", "phi_end": 0.2, "p_end": 0.2}})";
    RunManifest m = manifest({scenario}, dir.path);
    m.sweep = parse_sweep("c=1:1000000:7");
    REQUIRE(cmd_sweep(m, out, err) == 0);
    const auto rows = read_csv(dir.path / "moving_sweep_c.csv");
    REQUIRE(rows.size() == 8);
    double previous = INFINITY;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const double w = std::abs(std::stod(rows[k][6]));
      CHECK(w < previous);
      previous = w;
    }
    CHECK(previous < 1e-10);
  }
  SUBCASE("count 2 gives the endpoints") {
    RunManifest m = manifest({kData / "amplitude_damping.json"}, dir.path);
    m.sweep = parse_sweep("gamma=0:1:2");
    m.format = Format::Json;
    REQUIRE(cmd_sweep(m, out, err) == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "amplitude_damping_sweep_gamma.json"));
    REQUIRE(j.size() == 2);
    CHECK(j[0]["scenario_id"] == "amplitude_damping@gamma=0");
    CHECK(j[1]["scenario_id"] == "amplitude_damping@gamma=1");
  }
  SUBCASE("parameter that does not apply") {
    RunManifest m = manifest({kData / "amplitude_damping.json"}, dir.path);
    m.sweep = parse_sweep("omega=1:2:3");
    CHECK(cmd_sweep(m, out, err) == 2);
  }
}

TEST_CASE("verify detects a wrong dilation law") {
  std::ostringstream clean;
  const int rc = cmd_verify(clean);
  CHECK(clean.str().find("[PASS] 7 ") != std::string::npos);
  CHECK(clean.str().find("criteria passed") != std::string::npos);
  CHECK((rc == 0) == (clean.str().find("[FAIL]") == std::string::npos));

  VerifyOptions broken;
  broken.dilation_law = [](double phi, double p, double m, double c) { return dilation_factor(-phi, p, m, c); };
  std::ostringstream faulty;
  CHECK(cmd_verify(faulty, broken) == 1);
  CHECK(faulty.str().find("[FAIL] 7 ") != std::string::npos);
}

TEST_CASE("command line") {
  TempDir dir("argv");
  const auto run = invoke({"run", "--scenario", (kData / "comoving.json").string(), "--out", dir.path.string()});
  CHECK(run.code == 0);
  CHECK(fs::exists(dir.path / "comoving.csv"));

  const auto sweep = invoke({"sweep", "--scenario", (kData / "oscillator_blue.json").string(), "--out",
                             dir.path.string(), "--sweep", "beta=0.5:2:4", "--quiet", "--format", "json"});
  CHECK(sweep.code == 0);
  CHECK(sweep.out.empty());
  CHECK(fs::exists(dir.path / "oscillator_blue_sweep_beta.json"));

  CHECK(invoke({"sweep", "--scenario", (kData / "comoving.json").string(), "--sweep", "zeta=0:1:3"}).code == 2);
  CHECK(invoke({"run", "--scenario", (kData / "comoving.json").string(), "--format", "xml"}).code == 2);
  CHECK(invoke({"run"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"--version"}).out.find(version()) != std::string::npos);
}
