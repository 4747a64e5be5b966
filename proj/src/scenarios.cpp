#include "tdfr/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tdfr/errors.hpp"
#include "tdfr/random.hpp"

namespace tdfr {

using nlohmann::json;

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Flat:
      return "flat";
    case Pipeline::Dilated:
      return "dilated";
    case Pipeline::Appendix:
      return "appendix";
  }
  return "?";
}

std::string_view to_string(FinalBasis b) {
  return b == FinalBasis::Evolved ? "evolved" : "instantaneous";
}

namespace {

using Issues = std::vector<std::string>;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Reads fields from one JSON object, recording problems instead of throwing.
// finish() reports every key that was never asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, Issues& issues)
      : j_(j), path_(std::move(path)), issues_(issues), ok_(j.is_object()) {
    if (!ok_) issues_.push_back((path_.empty() ? "<root>" : path_) + ": expected a JSON object");
  }

  bool ok() const { return ok_; }
  bool has(const std::string& key) const { return ok_ && j_.contains(key); }
  const std::string& path() const { return path_; }

  const json* child(const std::string& key, bool required) {
    seen_.insert(key);
    if (!ok_) return nullptr;
    const auto it = j_.find(key);
    if (it == j_.end()) {
      if (required) issues_.push_back(join(path_, key) + ": required field is missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const std::string& key, bool required) {
    const json* v = child(key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      issues_.push_back(join(path_, key) + ": expected a number");
      return std::nullopt;
    }
    const double x = v->get<double>();
    if (!std::isfinite(x)) {
      issues_.push_back(join(path_, key) + ": must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::uint64_t> count(const std::string& key, bool required) {
    const json* v = child(key, required);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      issues_.push_back(join(path_, key) + ": expected a non-negative integer");
      return std::nullopt;
    }
    return v->get<std::uint64_t>();
  }

  std::optional<std::string> string(const std::string& key, bool required) {
    const json* v = child(key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      issues_.push_back(join(path_, key) + ": expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = child(key, false);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      issues_.push_back(join(path_, key) + ": expected true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  void finish() {
    if (!ok_) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) issues_.push_back(join(path_, key) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  Issues& issues_;
  bool ok_;
  std::set<std::string> seen_;
};

std::optional<Complex> parse_complex(const json& j, const std::string& path, Issues& issues) {
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  issues.push_back(path + ": expected a [re, im] pair");
  return std::nullopt;
}

// Accepts a list of rows of [re, im] pairs, or a flat row-major list of dim^2 pairs.
std::optional<ComplexMatrix> parse_matrix(const json& j, const std::string& path, Issues& issues) {
  if (!j.is_array() || j.empty()) {
    issues.push_back(path + ": expected a non-empty array of [re, im] pairs");
    return std::nullopt;
  }
  const bool flat = j[0].is_array() && j[0].size() == 2 && j[0][0].is_number();
  std::vector<Complex> entries;
  std::size_t n = 0;
  const std::size_t before = issues.size();
  if (flat) {
    n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(j.size()))));
    if (n * n != j.size()) {
      issues.push_back(path + ": flat matrix needs a square number of entries, got " +
                       std::to_string(j.size()));
      return std::nullopt;
    }
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (auto z = parse_complex(j[k], indexed(path, k), issues)) entries.push_back(*z);
    }
  } else {
    n = j.size();
    for (std::size_t r = 0; r < n; ++r) {
      const json& row = j[r];
      if (!row.is_array() || row.size() != n) {
        issues.push_back(indexed(path, r) + ": expected a row of " + std::to_string(n) + " entries");
        continue;
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (auto z = parse_complex(row[c], indexed(indexed(path, r), c), issues)) entries.push_back(*z);
      }
    }
  }
  if (issues.size() != before || entries.size() != n * n) return std::nullopt;
  ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entries[r * n + c];
    }
  }
  return m;
}

std::optional<SystemSpec> parse_system(const json& j, const std::string& path, Issues& issues) {
  ObjectReader r(j, path, issues);
  if (!r.ok()) return std::nullopt;
  SystemSpec spec;
  const auto type = r.string("type", true);
  bool good = type.has_value();
  if (type == "matrix") {
    spec.kind = SystemSpec::Kind::Matrix;
    if (const json* m = r.child("matrix", true)) {
      if (auto mat = parse_matrix(*m, join(path, "matrix"), issues)) {
        spec.matrix = *mat;
      } else {
        good = false;
      }
    } else {
      good = false;
    }
  } else if (type == "harmonic") {
    spec.kind = SystemSpec::Kind::Harmonic;
    if (auto omega = r.number("omega", true)) {
      if (!(*omega > 0.0)) {
        issues.push_back(join(path, "omega") + ": must be positive");
        good = false;
      }
      spec.omega = *omega;
    } else {
      good = false;
    }
    if (auto levels = r.count("levels", false)) {
      if (*levels < 2) {
        issues.push_back(join(path, "levels") + ": harmonic oscillator needs at least 2 levels");
        good = false;
      }
      spec.levels = *levels;
    }
  } else if (type == "two_level") {
    spec.kind = SystemSpec::Kind::TwoLevel;
    if (auto gap = r.number("gap", true)) {
      spec.gap = *gap;
    } else {
      good = false;
    }
  } else if (type == "random") {
    spec.kind = SystemSpec::Kind::Random;
    if (auto dim = r.count("dim", true)) {
      if (*dim < 1 || *dim > 200) {
        issues.push_back(join(path, "dim") + ": must lie in [1, 200]");
        good = false;
      }
      spec.dim = *dim;
    } else {
      good = false;
    }
    if (auto seed = r.count("seed", false)) spec.seed = *seed;
  } else if (type) {
    issues.push_back(join(path, "type") + ": unknown system type '" + *type +
                     "' (expected matrix, harmonic, two_level or random)");
    good = false;
  }
  r.finish();
  return good ? std::optional<SystemSpec>(spec) : std::nullopt;
}

struct PresetShape {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const std::map<std::string, PresetShape>& worldline_presets() {
  static const std::map<std::string, PresetShape> presets = {
      {"comoving", {{}, {"t_end", "samples"}}},
      {"uniform_gravity", {{"g"}, {"z0", "v", "t_end", "samples"}}},
      {"point_mass", {{"M", "r0", "r1"}, {"t_end", "samples"}}},
      {"cruise", {{"p"}, {"accel_time", "t_end", "samples"}}},
      {"ramp", {{}, {"phi_start", "phi_end", "p_start", "p_end", "t_end", "samples"}}},
  };
  return presets;
}

std::optional<WorldlineSpec> parse_worldline(const json& j, const std::string& path,
                                             const std::filesystem::path& base_dir, Issues& issues) {
  ObjectReader r(j, path, issues);
  if (!r.ok()) return std::nullopt;
  WorldlineSpec spec;
  const std::size_t before = issues.size();
  const auto preset = r.string("preset", true);
  if (!preset) {
    r.finish();
    return std::nullopt;
  }
  spec.preset = *preset;
  if (*preset == "csv") {
    if (auto file = r.string("path", true)) {
      std::filesystem::path p(*file);
      spec.csv_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
  } else if (*preset == "table") {
    if (const json* rows = r.child("rows", true)) {
      if (!rows->is_array()) {
        issues.push_back(join(path, "rows") + ": expected an array of [t, phi, p] rows");
      } else {
        for (std::size_t k = 0; k < rows->size(); ++k) {
          const json& row = (*rows)[k];
          if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() ||
              !row[2].is_number()) {
            issues.push_back(indexed(join(path, "rows"), k) + ": expected [t, phi, p]");
            continue;
          }
          spec.rows.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
      }
    }
  } else if (const auto it = worldline_presets().find(*preset); it != worldline_presets().end()) {
    for (const auto& key : it->second.required) {
      if (auto v = r.number(key, true)) spec.params[key] = *v;
    }
    for (const auto& key : it->second.optional) {
      if (auto v = r.number(key, false)) spec.params[key] = *v;
    }
    if (spec.params.contains("samples")) {
      const double s = spec.params["samples"];
      if (s < 2 || s != std::floor(s)) {
        issues.push_back(join(path, "samples") + ": must be an integer >= 2");
      }
    }
    if (spec.params.contains("t_end") && !(spec.params["t_end"] > 0.0)) {
      issues.push_back(join(path, "t_end") + ": must be positive");
    }
  } else {
    issues.push_back(join(path, "preset") + ": unknown worldline preset '" + *preset + "'");
  }
  r.finish();
  return issues.size() == before ? std::optional<WorldlineSpec>(spec) : std::nullopt;
}

std::optional<ChannelSpec> parse_channel(const json& j, const std::string& path, Issues& issues) {
  ObjectReader r(j, path, issues);
  if (!r.ok()) return std::nullopt;
  ChannelSpec spec;
  const std::size_t before = issues.size();
  const auto preset = r.string("preset", true);
  if (preset) spec.preset = *preset;
  if (preset == "identity") {
  } else if (preset == "amplitude_damping") {
    if (auto g = r.number("gamma", true)) {
      if (!(*g >= 0.0 && *g <= 1.0)) issues.push_back(join(path, "gamma") + ": must lie in [0, 1]");
      spec.params["gamma"] = *g;
    }
  } else if (preset == "depolarizing") {
    if (auto l = r.number("lambda", true)) {
      if (!(*l >= 0.0)) issues.push_back(join(path, "lambda") + ": must be non-negative");
      spec.params["lambda"] = *l;
    }
  } else if (preset == "unitary") {
    if (const json* m = r.child("matrix", true)) {
      if (auto mat = parse_matrix(*m, join(path, "matrix"), issues)) spec.matrix = *mat;
    }
  } else if (preset == "kraus") {
    if (const json* ops = r.child("operators", true)) {
      if (!ops->is_array() || ops->empty()) {
        issues.push_back(join(path, "operators") + ": expected a non-empty array of matrices");
      } else {
        for (std::size_t k = 0; k < ops->size(); ++k) {
          if (auto mat = parse_matrix((*ops)[k], indexed(join(path, "operators"), k), issues)) {
            spec.kraus.push_back(*mat);
          }
        }
      }
    }
  } else if (preset) {
    issues.push_back(join(path, "preset") + ": unknown channel preset '" + *preset +
                     "' (expected identity, amplitude_damping, depolarizing, unitary or kraus)");
  }
  r.finish();
  return issues.size() == before ? std::optional<ChannelSpec>(spec) : std::nullopt;
}

std::optional<std::vector<ScheduleSegment>> parse_schedule(const json& j, const std::string& path,
                                                           Issues& issues) {
  if (!j.is_array()) {
    issues.push_back(path + ": expected an array of {tau, system} segments");
    return std::nullopt;
  }
  const std::size_t before = issues.size();
  std::vector<ScheduleSegment> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string item = indexed(path, k);
    ObjectReader r(j[k], item, issues);
    if (!r.ok()) continue;
    ScheduleSegment seg;
    if (auto tau = r.number("tau", true)) seg.tau = *tau;
    if (const json* sys = r.child("system", true)) {
      if (auto s = parse_system(*sys, join(item, "system"), issues)) seg.system = *s;
    }
    r.finish();
    out.push_back(seg);
  }
  if (issues.size() != before) return std::nullopt;
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  // Tracks the field being parsed so a syntax error can name it.
  std::vector<std::string> where;
  std::string pending_key;
  const json::parser_callback_t track = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::key:
        pending_key = parsed.get<std::string>();
        break;
      case json::parse_event_t::object_start:
      case json::parse_event_t::array_start:
        where.push_back(pending_key);
        pending_key.clear();
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        if (!where.empty()) where.pop_back();
        pending_key.clear();
        break;
      case json::parse_event_t::value:
        pending_key.clear();
        break;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(json_text, track);
  } catch (const json::parse_error& e) {
    std::string field;
    for (const auto& part : where) {
      if (!part.empty()) field = join(field, part);
    }
    if (!pending_key.empty()) field = join(field, pending_key);
    throw ValidationError({(field.empty() ? std::string("<document>") : field) + ": malformed JSON: " + e.what()});
  }

  Issues issues;
  ScenarioConfig cfg;
  ObjectReader r(doc, "", issues);
  if (!r.ok()) throw ValidationError(issues);

  if (auto id = r.string("scenario_id", true)) cfg.scenario_id = *id;
  if (auto pipeline = r.string("pipeline", true)) {
    if (*pipeline == "flat") {
      cfg.pipeline = Pipeline::Flat;
    } else if (*pipeline == "dilated") {
      cfg.pipeline = Pipeline::Dilated;
    } else if (*pipeline == "appendix") {
      cfg.pipeline = Pipeline::Appendix;
    } else {
      issues.push_back("pipeline: unknown pipeline '" + *pipeline +
                       "' (expected flat, dilated or appendix)");
    }
  }
  if (const json* sys = r.child("system", true)) {
    if (auto s = parse_system(*sys, "system", issues)) cfg.system = *s;
  }
  if (const json* sys = r.child("final_system", false)) {
    if (auto s = parse_system(*sys, "final_system", issues)) cfg.final_system = *s;
  }
  if (auto beta = r.number("beta", true)) cfg.beta = *beta;
  if (const json* wl = r.child("worldline", false)) {
    cfg.worldline = parse_worldline(*wl, "worldline", base_dir, issues);
  }
  if (auto mass = r.number("mass", false)) cfg.mass = *mass;
  if (auto c = r.number("c", false)) cfg.c = *c;
  if (auto large_m = r.boolean("large_m")) cfg.large_m = *large_m;
  if (const json* ch = r.child("channel", false)) cfg.channel = parse_channel(*ch, "channel", issues);
  if (const json* sched = r.child("schedule", false)) {
    cfg.schedule = parse_schedule(*sched, "schedule", issues);
  }
  if (auto steps = r.count("steps", false)) cfg.steps = *steps;
  if (auto basis = r.string("final_basis", false)) {
    if (*basis == "evolved") {
      cfg.final_basis = FinalBasis::Evolved;
    } else if (*basis == "instantaneous") {
      cfg.final_basis = FinalBasis::Instantaneous;
    } else {
      issues.push_back("final_basis: expected 'evolved' or 'instantaneous', got '" + *basis + "'");
    }
  }
  if (auto mc = r.count("mc_samples", false)) cfg.mc_samples = *mc;
  if (auto seed = r.count("seed", false)) cfg.seed = *seed;
  r.finish();

  // Presence checks on the raw document: a field that failed to parse is
  // already reported and should not also be reported as missing.
  const auto present = [&](const char* key) { return doc.contains(key); };
  for (auto& issue : validate(cfg)) {
    const auto colon = issue.find(':');
    const std::string field = issue.substr(0, colon);
    const bool missing_but_present =
        issue.find("required for") != std::string::npos && present(field.c_str());
    if (!missing_but_present) issues.push_back(std::move(issue));
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return cfg;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.parent_path());
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
  Issues issues;
  if (cfg.scenario_id.empty()) {
    issues.push_back("scenario_id: must be non-empty");
  } else if (!std::all_of(cfg.scenario_id.begin(), cfg.scenario_id.end(), [](char ch) {
               return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ||
                      ch == '.' || ch == '@' || ch == '=' || ch == '+';
             })) {
    issues.push_back("scenario_id: may only contain letters, digits and _-.@=+");
  }
  if (!(cfg.beta > 0.0)) issues.push_back("beta: must be positive");
  if (!(cfg.mass > 0.0)) issues.push_back("mass: must be positive");
  if (!(cfg.c > 0.0)) issues.push_back("c: must be positive");

  const std::string name(to_string(cfg.pipeline));
  const auto forbid = [&](bool present, const char* field) {
    if (present) issues.push_back(std::string(field) + ": not used by the " + name + " pipeline");
  };
  const auto require = [&](bool present, const char* field) {
    if (!present) issues.push_back(std::string(field) + ": required for the " + name + " pipeline");
  };
  switch (cfg.pipeline) {
    case Pipeline::Flat:
      require(cfg.channel.has_value(), "channel");
      forbid(cfg.worldline.has_value(), "worldline");
      forbid(cfg.schedule.has_value(), "schedule");
      forbid(cfg.steps.has_value(), "steps");
      forbid(cfg.final_basis.has_value(), "final_basis");
      break;
    case Pipeline::Dilated:
      require(cfg.worldline.has_value(), "worldline");
      forbid(cfg.channel.has_value(), "channel");
      forbid(cfg.final_system.has_value(), "final_system");
      forbid(cfg.schedule.has_value(), "schedule");
      forbid(cfg.steps.has_value(), "steps");
      forbid(cfg.final_basis.has_value(), "final_basis");
      break;
    case Pipeline::Appendix:
      require(cfg.worldline.has_value(), "worldline");
      require(cfg.schedule.has_value(), "schedule");
      forbid(cfg.channel.has_value(), "channel");
      forbid(cfg.final_system.has_value(), "final_system");
      if (cfg.steps && *cfg.steps < 1) issues.push_back("steps: must be >= 1");
      break;
  }
  if (cfg.schedule) {
    const auto& segs = *cfg.schedule;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      if (!(segs[k].tau > 0.0)) {
        issues.push_back(indexed("schedule", k) + ".tau: must be positive (tau = 0 is `system`)");
      } else if (k > 0 && !(segs[k].tau > segs[k - 1].tau)) {
        issues.push_back(indexed("schedule", k) + ".tau: segment starts must be strictly increasing");
      }
    }
  }
  return issues;
}

HermitianOperator harmonic_oscillator(double omega, std::size_t levels) {
  if (levels < 2) throw ArgumentError("harmonic oscillator needs at least 2 levels");
  std::vector<double> e(levels);
  for (std::size_t n = 0; n < levels; ++n) e[n] = (static_cast<double>(n) + 0.5) * omega;
  return HermitianOperator::diagonal(e);
}

HermitianOperator two_level(double gap) { return HermitianOperator::diagonal({0.0, gap}); }

std::size_t oscillator_levels_for(double beta_omega, double tail) {
  if (!(beta_omega > 0.0)) throw ArgumentError("oscillator_levels_for: beta*omega must be positive");
  // exp(-x N) < tail  <=>  N > -ln(tail)/x
  const double bound = -std::log(tail) / beta_omega;
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(bound)) + 1);
}

namespace {

double log_sinh(double x) {
  return x > 1.0 ? x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0) : std::log(std::sinh(x));
}

}  // namespace

double oscillator_delta_F_analytic(double beta_omega, double alpha) {
  if (!(beta_omega > 0.0) || !(alpha > 0.0)) {
    throw ArgumentError("oscillator_delta_F_analytic: beta*omega and alpha must be positive");
  }
  if (alpha == 1.0) return 0.0;
  return log_sinh(alpha * beta_omega / 2.0) - log_sinh(beta_omega / 2.0);
}

double oscillator_mean_work_analytic(double beta_omega, double alpha) {
  if (!(beta_omega > 0.0) || !(alpha > 0.0)) {
    throw ArgumentError("oscillator_mean_work_analytic: beta*omega and alpha must be positive");
  }
  const double x = beta_omega / 2.0;
  return (alpha - 1.0) * x / std::tanh(x);
}

HermitianOperator build_system(const SystemSpec& spec, double beta, double level_scale) {
  switch (spec.kind) {
    case SystemSpec::Kind::Matrix:
      return HermitianOperator(spec.matrix);
    case SystemSpec::Kind::Harmonic: {
      const std::size_t levels =
          spec.levels > 0 ? spec.levels
                          : oscillator_levels_for(beta * spec.omega * std::min(1.0, level_scale));
      return harmonic_oscillator(spec.omega, levels);
    }
    case SystemSpec::Kind::TwoLevel:
      return two_level(spec.gap);
    case SystemSpec::Kind::Random:
      return random_hermitian(spec.dim, spec.seed);
  }
  throw ArgumentError("unknown system kind");
}

namespace {

double param(const WorldlineSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

template <class Fn>
std::vector<WorldlineSample> sampled(const WorldlineSpec& spec, double default_samples, Fn&& fn) {
  const double t_end = param(spec, "t_end", 1.0);
  const auto n = static_cast<std::size_t>(param(spec, "samples", default_samples));
  if (!(t_end > 0.0)) throw ArgumentError("t_end must be positive");
  if (n < 2) throw ArgumentError("samples must be >= 2");
  std::vector<WorldlineSample> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Endpoints exact; interior on a uniform grid.
    const double t = k + 1 == n ? t_end : t_end * static_cast<double>(k) / static_cast<double>(n - 1);
    out[k] = fn(t, t_end);
  }
  return out;
}

}  // namespace

std::vector<WorldlineSample> build_worldline_samples(const WorldlineSpec& spec) {
  const std::string& p = spec.preset;
  if (p == "csv") return read_worldline_csv(spec.csv_path);
  if (p == "table") return spec.rows;
  if (p == "comoving") {
    return sampled(spec, 2, [](double t, double) { return WorldlineSample{t, 0.0, 0.0}; });
  }
  if (p == "uniform_gravity") {
    const double g = param(spec, "g", 0.0);
    const double z0 = param(spec, "z0", 0.0);
    const double v = param(spec, "v", 1.0);
    return sampled(spec, 101, [=](double t, double) { return WorldlineSample{t, g * (z0 + v * t), 0.0}; });
  }
  if (p == "point_mass") {
    const double mass = param(spec, "M", 0.0);
    const double r0 = param(spec, "r0", 1.0);
    const double r1 = param(spec, "r1", 1.0);
    if (!(r0 > 0.0) || !(r1 > 0.0)) throw ArgumentError("radii must be positive");
    return sampled(spec, 101, [=](double t, double t_end) {
      const double r = r0 + (r1 - r0) * t / t_end;
      return WorldlineSample{t, -mass / r, 0.0};
    });
  }
  if (p == "cruise") {
    const double momentum = param(spec, "p", 0.0);
    const double t_end = param(spec, "t_end", 1.0);
    const double accel = param(spec, "accel_time", 0.1 * t_end);
    if (accel < 0.0) throw ArgumentError("accel_time must be non-negative");
    return sampled(spec, 101, [=](double t, double) {
      const double ramp = accel > 0.0 ? std::min(1.0, t / accel) : 1.0;
      return WorldlineSample{t, 0.0, momentum * ramp};
    });
  }
  if (p == "ramp") {
    const double phi0 = param(spec, "phi_start", 0.0);
    const double phi1 = param(spec, "phi_end", 0.0);
    const double p0 = param(spec, "p_start", 0.0);
    const double p1 = param(spec, "p_end", 0.0);
    return sampled(spec, 101, [=](double t, double t_end) {
      const double s = t / t_end;
      return WorldlineSample{t, phi0 + (phi1 - phi0) * s, p0 + (p1 - p0) * s};
    });
  }
  throw ArgumentError("unknown worldline preset '" + p + "'");
}

QuantumChannel build_channel(const ChannelSpec& spec, std::size_t dim) {
  const auto get = [&](const char* key) {
    const auto it = spec.params.find(key);
    if (it == spec.params.end()) throw ArgumentError(std::string("missing parameter ") + key);
    return it->second;
  };
  if (spec.preset == "identity") return identity_channel(dim);
  if (spec.preset == "amplitude_damping") {
    if (dim != 2) throw ArgumentError("amplitude_damping acts on a 2-level system, got dim " +
                                      std::to_string(dim));
    return amplitude_damping(get("gamma"));
  }
  if (spec.preset == "depolarizing") return depolarizing(dim, get("lambda"));
  if (spec.preset == "unitary") {
    if (static_cast<std::size_t>(spec.matrix.rows()) != dim) {
      throw ArgumentError("unitary dimension does not match the system");
    }
    return unitary_channel(spec.matrix);
  }
  if (spec.preset == "kraus") {
    if (!spec.kraus.empty() && static_cast<std::size_t>(spec.kraus.front().rows()) != dim) {
      throw ArgumentError("Kraus operator dimension does not match the system");
    }
    return QuantumChannel(spec.kraus);
  }
  throw ArgumentError("unknown channel preset '" + spec.preset + "'");
}

Scenario build_scenario(const ScenarioConfig& cfg, const DilationLaw& law) {
  Issues issues = validate(cfg);
  if (!issues.empty()) throw ValidationError(std::move(issues));

  const auto attempt = [&](const std::string& field, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      issues.push_back(field + ": " + e.what());
    }
  };

  StaticSpacetime spacetime{cfg.c, !cfg.large_m};
  std::optional<Worldline> worldline;
  std::optional<DilationProfile> profile;
  if (cfg.worldline) {
    attempt("worldline", [&] {
      worldline.emplace(build_worldline_samples(*cfg.worldline), cfg.mass);
      profile.emplace(dilation_profile(*worldline, spacetime, law));
    });
  }
  const double level_scale = profile ? profile->final_alpha() / profile->initial_alpha() : 1.0;

  std::optional<HermitianOperator> h_int;
  double truncation_error = 0.0;
  attempt("system", [&] {
    h_int.emplace(build_system(cfg.system, cfg.beta, level_scale));
    if (cfg.system.kind == SystemSpec::Kind::Harmonic) {
      truncation_error = std::exp(-cfg.beta * cfg.system.omega * static_cast<double>(h_int->dim()));
    }
  });

  std::optional<HermitianOperator> h_final;
  if (cfg.final_system) {
    attempt("final_system", [&] {
      h_final.emplace(build_system(*cfg.final_system, cfg.beta));
      if (h_int && h_final->dim() != h_int->dim()) {
        throw ArgumentError("dimension " + std::to_string(h_final->dim()) +
                            " differs from system dimension " + std::to_string(h_int->dim()));
      }
    });
  }

  std::optional<QuantumChannel> channel;
  if (cfg.channel && h_int) {
    attempt("channel", [&] { channel.emplace(build_channel(*cfg.channel, h_int->dim())); });
  }

  std::optional<PiecewiseConstantHamiltonian> schedule;
  if (cfg.schedule && h_int) {
    std::vector<double> starts{0.0};
    std::vector<HermitianOperator> hams{*h_int};
    for (std::size_t k = 0; k < cfg.schedule->size(); ++k) {
      const auto& seg = (*cfg.schedule)[k];
      attempt(indexed("schedule", k) + ".system", [&] {
        SystemSpec s = seg.system;
        if (s.kind == SystemSpec::Kind::Harmonic && s.levels == 0) s.levels = h_int->dim();
        HermitianOperator h = build_system(s, cfg.beta, level_scale);
        if (h.dim() != h_int->dim()) {
          throw ArgumentError("dimension " + std::to_string(h.dim()) +
                              " differs from system dimension " + std::to_string(h_int->dim()));
        }
        starts.push_back(seg.tau);
        hams.push_back(std::move(h));
      });
      if (profile && !(seg.tau < profile->tau_total())) {
        issues.push_back(indexed("schedule", k) + ".tau: starts after the worldline's total proper time " +
                         std::to_string(profile->tau_total()));
      }
    }
    if (issues.empty()) {
      attempt("schedule", [&] { schedule.emplace(std::move(starts), std::move(hams)); });
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));

  Scenario s{.id = cfg.scenario_id,
             .pipeline = cfg.pipeline,
             .h_int = *h_int,
             .h_final = h_final,
             .beta = cfg.beta,
             .channel = channel,
             .spacetime = spacetime,
             .worldline = worldline,
             .profile = profile,
             .schedule = schedule,
             .steps = cfg.pipeline == Pipeline::Appendix ? cfg.steps.value_or(kDefaultSteps) : 0,
             .final_basis = cfg.final_basis.value_or(FinalBasis::Evolved),
             .mc_samples = cfg.mc_samples,
             .seed = cfg.seed,
             .truncation_error = truncation_error};
  return s;
}

bool is_sweep_parameter(std::string_view name) {
  return name == "alpha" || name == "beta" || name == "omega" || name == "c" || name == "gamma";
}

ScenarioConfig with_parameter(ScenarioConfig cfg, std::string_view name, double value) {
  const std::string key(name);
  if (name == "alpha") {
    if (cfg.pipeline == Pipeline::Flat) {
      throw ValidationError({"sweep.alpha: the flat pipeline has no worldline"});
    }
    const double t_end =
        cfg.worldline && cfg.worldline->params.contains("t_end") ? cfg.worldline->params.at("t_end") : 1.0;
    WorldlineSpec ramp;
    ramp.preset = "ramp";
    ramp.params = {{"phi_start", 0.0},
                   {"phi_end", (value - 1.0) * cfg.c * cfg.c},
                   {"t_end", t_end},
                   {"samples", 2.0}};
    cfg.worldline = ramp;
    cfg.large_m = true;
  } else if (name == "beta") {
    cfg.beta = value;
  } else if (name == "c") {
    cfg.c = value;
  } else if (name == "omega") {
    if (cfg.system.kind != SystemSpec::Kind::Harmonic) {
      throw ValidationError({"sweep.omega: system is not a harmonic oscillator"});
    }
    cfg.system.omega = value;
  } else if (name == "gamma") {
    if (!cfg.channel) throw ValidationError({"sweep.gamma: scenario has no channel"});
    if (cfg.channel->preset == "amplitude_damping") {
      cfg.channel->params["gamma"] = value;
    } else if (cfg.channel->preset == "depolarizing") {
      cfg.channel->params["lambda"] = value;
    } else {
      throw ValidationError({"sweep.gamma: channel preset '" + cfg.channel->preset +
                             "' has no gamma-type parameter"});
    }
  } else {
    throw ValidationError({"sweep: unknown parameter '" + key +
                           "' (expected alpha, beta, omega, c or gamma)"});
  }
  return cfg;
}

}  // namespace tdfr
