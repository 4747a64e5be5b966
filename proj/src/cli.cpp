#include "tdfr/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "tdfr/errors.hpp"
#include "tdfr/protocol.hpp"
#include "tdfr/report.hpp"
#include "tdfr/scenarios.hpp"

#ifndef TDFR_VERSION
#define TDFR_VERSION "0.0.0"
#endif

namespace tdfr::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string version() { return TDFR_VERSION; }

namespace {

constexpr int code(ExitCode c) { return static_cast<int>(c); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

ScenarioConfig load_with_overrides(const fs::path& path, const RunManifest& m) {
  ScenarioConfig cfg = load_scenario_file(path);
  if (m.seed) cfg.seed = *m.seed;
  if (m.steps && cfg.pipeline == Pipeline::Appendix) cfg.steps = *m.steps;
  return cfg;
}

ordered_json manifest_json(const RunManifest& m, const std::vector<std::string>& outputs) {
  ordered_json j;
  j["tool"] = "tdfr";
  j["version"] = m.version.empty() ? version() : m.version;
  j["timestamp"] = m.timestamp.empty() ? utc_timestamp() : m.timestamp;
  j["format"] = m.format == Format::Csv ? "csv" : "json";
  j["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json(nullptr);
  j["steps"] = m.steps ? ordered_json(*m.steps) : ordered_json(nullptr);
  if (m.sweep) {
    j["sweep"] = {{"parameter", m.sweep->parameter},
                  {"start", m.sweep->start},
                  {"stop", m.sweep->stop},
                  {"count", m.sweep->count}};
  } else {
    j["sweep"] = nullptr;
  }
  ordered_json inputs = ordered_json::array();
  for (const auto& p : m.scenarios) inputs.push_back(p.string());
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  return j;
}

std::string report_table(const std::vector<ProtocolReport>& reports, Format format) {
  if (format == Format::Csv) {
    std::string s = csv_header();
    for (const auto& r : reports) s += to_csv_row(r);
    return s;
  }
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(ordered_json::parse(to_json(r)));
  return arr.dump(2) + "\n";
}

// Runs `n` independent jobs on a bounded pool; results keep index order and
// the first failure by index is rethrown.
template <typename T, typename Fn>
std::vector<T> run_indexed(std::size_t n, Fn&& job) {
  std::vector<std::optional<T>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < workers; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

void print_summary(std::ostream& out, const ProtocolReport& r) {
  out << r.scenario_id << " residual=" << format_number(r.residual)
      << " entropy_production=" << format_number(r.entropy_production) << '\n';
}

void print_error(std::ostream& err, const fs::path& source, const std::exception& e) {
  err << "error: ";
  if (!source.empty()) err << source.string() << ": ";
  err << e.what() << '\n';
}

}  // namespace

std::vector<double> SweepSpec::grid() const {
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    g[k] = start + (stop - start) * t;
  }
  if (count >= 1) g.front() = start;
  if (count >= 2) g.back() = stop;
  return g;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw ValidationError({"--sweep: expected <param>=<start>:<stop>:<count>, got '" + text + "'"});
  }
  SweepSpec s;
  s.parameter = text.substr(0, eq);
  std::vector<std::string> issues;
  if (!is_sweep_parameter(s.parameter)) {
    issues.push_back("--sweep: unknown parameter '" + s.parameter + "' (expected alpha, beta, omega, c or gamma)");
  }
  const std::string rest = text.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : rest.find(':', c1 + 1);
  if (c2 == std::string::npos || rest.find(':', c2 + 1) != std::string::npos) {
    issues.push_back("--sweep: expected <start>:<stop>:<count> after '=', got '" + rest + "'");
    throw ValidationError(issues);
  }
  const auto start = parse_double(std::string_view(rest).substr(0, c1));
  const auto stop = parse_double(std::string_view(rest).substr(c1 + 1, c2 - c1 - 1));
  const std::string count_text = rest.substr(c2 + 1);
  std::size_t count = 0;
  const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (!start) issues.push_back("--sweep: start is not a finite number");
  if (!stop) issues.push_back("--sweep: stop is not a finite number");
  if (ec != std::errc() || ptr != count_text.data() + count_text.size() || count_text.empty()) {
    issues.push_back("--sweep: count is not a non-negative integer");
  } else if (count < 2) {
    issues.push_back("--sweep: count must be >= 2");
  }
  if (!issues.empty()) throw ValidationError(issues);
  s.start = *start;
  s.stop = *stop;
  s.count = count;
  return s;
}

int cmd_run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  if (m.scenarios.empty()) {
    err << "error: no scenario given (--scenario)\n";
    return code(ExitCode::Validation);
  }
  try {
    prepare_out_dir(m.out_dir);
  } catch (const IoError& e) {
    print_error(err, {}, e);
    return code(ExitCode::Io);
  }

  int status = code(ExitCode::Ok);
  std::vector<std::string> outputs;
  std::set<std::string> seen_ids;
  for (const auto& path : m.scenarios) {
    try {
      const ScenarioConfig cfg = load_with_overrides(path, m);
      if (!seen_ids.insert(cfg.scenario_id).second) {
        throw ValidationError({"scenario_id: '" + cfg.scenario_id + "' already used by another scenario"});
      }
      const ProtocolReport r = run_protocol(build_scenario(cfg));

      const std::string ext = m.format == Format::Csv ? ".csv" : ".json";
      const std::string report = m.format == Format::Csv ? csv_header() + to_csv_row(r) : to_json(r);
      std::vector<std::pair<std::string, std::string>> files = {
          {r.scenario_id + ext, report}, {r.scenario_id + "_atoms.csv", atoms_csv(r)}};
      if (r.monte_carlo) files.emplace_back(r.scenario_id + "_mc.csv", monte_carlo_csv(*r.monte_carlo));
      for (const auto& [name, content] : files) {
        write_file(m.out_dir / name, content);
        outputs.push_back(name);
      }
      if (!m.quiet) print_summary(out, r);
    } catch (const IoError& e) {
      print_error(err, path, e);
      status = std::max(status, code(ExitCode::Io));
    } catch (const std::exception& e) {
      // Validation, construction and weak-field failures all stem from the input.
      print_error(err, path, e);
      status = std::max(status, code(ExitCode::Validation));
    }
  }

  try {
    write_file(m.out_dir / "manifest.json", manifest_json(m, outputs).dump(2) + "\n");
  } catch (const IoError& e) {
    print_error(err, {}, e);
    status = code(ExitCode::Io);
  }
  return status;
}

int cmd_sweep(const RunManifest& m, std::ostream& out, std::ostream& err) {
  if (!m.sweep) {
    err << "error: no sweep given (--sweep)\n";
    return code(ExitCode::Validation);
  }
  if (m.scenarios.empty()) {
    err << "error: no scenario given (--scenario)\n";
    return code(ExitCode::Validation);
  }
  try {
    prepare_out_dir(m.out_dir);
  } catch (const IoError& e) {
    print_error(err, {}, e);
    return code(ExitCode::Io);
  }

  const SweepSpec& sweep = *m.sweep;
  const std::vector<double> grid = sweep.grid();
  int status = code(ExitCode::Ok);
  std::vector<std::string> outputs;
  std::set<std::string> seen_ids;
  for (const auto& path : m.scenarios) {
    try {
      const ScenarioConfig base = load_with_overrides(path, m);
      if (!seen_ids.insert(base.scenario_id).second) {
        throw ValidationError({"scenario_id: '" + base.scenario_id + "' already used by another scenario"});
      }
      std::vector<ScenarioConfig> points;
      for (double v : grid) {
        ScenarioConfig cfg = with_parameter(base, sweep.parameter, v);
        cfg.scenario_id = base.scenario_id + "@" + sweep.parameter + "=" + format_number(v);
        points.push_back(std::move(cfg));
      }
      const auto reports =
          run_indexed<ProtocolReport>(points.size(), [&](std::size_t i) { return run_protocol(points[i]); });

      const std::string name = base.scenario_id + "_sweep_" + sweep.parameter +
                               (m.format == Format::Csv ? ".csv" : ".json");
      write_file(m.out_dir / name, report_table(reports, m.format));
      outputs.push_back(name);
      if (!m.quiet) {
        for (const auto& r : reports) print_summary(out, r);
      }
    } catch (const IoError& e) {
      print_error(err, path, e);
      status = std::max(status, code(ExitCode::Io));
    } catch (const std::exception& e) {
      print_error(err, path, e);
      status = std::max(status, code(ExitCode::Validation));
    }
  }

  try {
    write_file(m.out_dir / "manifest.json", manifest_json(m, outputs).dump(2) + "\n");
  } catch (const IoError& e) {
    print_error(err, {}, e);
    status = code(ExitCode::Io);
  }
  return status;
}

int cmd_verify(std::ostream& out, const VerifyOptions& opts) {
  const auto results = run_acceptance_suite(opts);
  std::size_t passed = 0;
  for (const auto& r : results) {
    out << format_result(r) << '\n';
    if (r.passed) ++passed;
  }
  out << passed << "/" << results.size() << " criteria passed\n";
  return passed == results.size() ? code(ExitCode::Ok) : code(ExitCode::VerifyFailed);
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-point-measurement work statistics on static worldlines", "tdfr"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  RunManifest m;
  std::vector<std::string> scenario_paths;
  std::string out_dir = "results";
  std::string format = "csv";
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  std::string sweep_text;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_paths, "Scenario JSON file (repeatable)")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--seed", seed, "Monte Carlo seed (overrides the scenario's seed)");
    sub->add_option("--steps", steps, "Step count for appendix-pipeline scenarios")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", m.quiet, "Suppress per-scenario summary lines");
  };
  CLI::App* run = app.add_subcommand("run", "Run scenarios and write one report each");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one parameter over a linear grid");
  add_common(sweep);
  sweep->add_option("--sweep", sweep_text, "<param>=<start>:<stop>:<count>")->required();
  CLI::App* verify = app.add_subcommand("verify", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? code(ExitCode::Ok) : code(ExitCode::Validation);
  }

  if (verify->parsed()) return cmd_verify(out);

  CLI::App* sub = run->parsed() ? run : sweep;
  for (const auto& p : scenario_paths) m.scenarios.emplace_back(p);
  m.out_dir = out_dir;
  m.format = format == "json" ? Format::Json : Format::Csv;
  if (sub->count("--seed") > 0) m.seed = seed;
  if (sub->count("--steps") > 0) m.steps = steps;
  m.version = version();
  m.timestamp = utc_timestamp();

  if (sweep->parsed()) {
    try {
      m.sweep = parse_sweep(sweep_text);
    } catch (const ValidationError& e) {
      print_error(err, {}, e);
      return code(ExitCode::Validation);
    }
    return cmd_sweep(m, out, err);
  }
  return cmd_run(m, out, err);
}

}  // namespace tdfr::cli
