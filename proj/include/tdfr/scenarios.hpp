#pragma once

// Scenario configuration: parsing and validating scenario documents,
// instantiating Hamiltonians, worldlines, channels and schedules, plus the
// closed-form harmonic-oscillator oracles.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdfr/channels.hpp"
#include "tdfr/operators.hpp"
#include "tdfr/spacetime.hpp"

namespace tdfr {

enum class Pipeline { Flat, Dilated, Appendix };
enum class FinalBasis { Evolved, Instantaneous };

std::string_view to_string(Pipeline p);
std::string_view to_string(FinalBasis b);

struct SystemSpec {
  enum class Kind { Matrix, Harmonic, TwoLevel, Random };
  Kind kind = Kind::TwoLevel;
  ComplexMatrix matrix;
  double omega = 1.0;
  // 0 selects the truncation automatically from beta*omega.
  std::size_t levels = 0;
  double gap = 1.0;
  std::size_t dim = 2;
  std::uint64_t seed = 0;
};

struct WorldlineSpec {
  // comoving | uniform_gravity | point_mass | cruise | ramp | csv | table
  std::string preset = "comoving";
  std::map<std::string, double> params;
  std::filesystem::path csv_path;
  std::vector<WorldlineSample> rows;
};

struct ChannelSpec {
  // identity | amplitude_damping | depolarizing | unitary | kraus
  std::string preset = "identity";
  std::map<std::string, double> params;
  ComplexMatrix matrix;
  std::vector<ComplexMatrix> kraus;
};

/// H_int switches to `system` at proper time `tau`.
struct ScheduleSegment {
  double tau = 0.0;
  SystemSpec system;
};

struct ScenarioConfig {
  std::string scenario_id;
  Pipeline pipeline = Pipeline::Dilated;
  SystemSpec system;
  std::optional<SystemSpec> final_system;  // flat only; defaults to `system`
  double beta = 1.0;
  std::optional<WorldlineSpec> worldline;  // dilated and appendix
  double mass = 1.0;
  double c = 1.0;
  bool large_m = false;
  std::optional<ChannelSpec> channel;                   // flat only
  std::optional<std::vector<ScheduleSegment>> schedule;  // appendix only
  std::optional<std::size_t> steps;                     // appendix only
  std::optional<FinalBasis> final_basis;                // appendix only
  std::size_t mc_samples = 0;
  std::uint64_t seed = 0;
};

/// Default step count of the appendix pipeline when `steps` is absent.
inline constexpr std::size_t kDefaultSteps = 1000;

/// Parses one scenario JSON document. Unknown fields, type errors and range
/// violations are collected and thrown together as a ValidationError.
/// Relative CSV worldline paths resolve against `base_dir`.
ScenarioConfig parse_scenario(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});

/// Throws IoError if the file cannot be read.
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

/// Cross-field checks (pipeline-specific field presence, ranges). Empty when valid.
std::vector<std::string> validate(const ScenarioConfig& config);

/// Validated run inputs with every module invariant established.
struct Scenario {
  std::string id;
  Pipeline pipeline = Pipeline::Dilated;
  HermitianOperator h_int;  // internal Hamiltonian at tau = 0 (H_0 for flat)
  std::optional<HermitianOperator> h_final;
  double beta = 1.0;
  std::optional<QuantumChannel> channel;
  StaticSpacetime spacetime;
  std::optional<Worldline> worldline;
  std::optional<DilationProfile> profile;
  std::optional<PiecewiseConstantHamiltonian> schedule;
  std::size_t steps = 0;
  FinalBasis final_basis = FinalBasis::Evolved;
  std::size_t mc_samples = 0;
  std::uint64_t seed = 0;
  // e^{-beta omega N} for truncated oscillators, 0 otherwise.
  double truncation_error = 0.0;
};

/// Instantiates a configuration. Every failing component is reported, with
/// its field path, in one ValidationError.
Scenario build_scenario(const ScenarioConfig& config, const DilationLaw& law = {});

/// `level_scale` shrinks the effective beta*omega used to pick an automatic
/// oscillator truncation (pass min(1, alpha) when levels get rescaled by alpha).
HermitianOperator build_system(const SystemSpec& spec, double beta, double level_scale = 1.0);
std::vector<WorldlineSample> build_worldline_samples(const WorldlineSpec& spec);
QuantumChannel build_channel(const ChannelSpec& spec, std::size_t dim);

/// Sweepable parameters: alpha, beta, omega, c, gamma.
bool is_sweep_parameter(std::string_view name);

/// Copy of `config` with one parameter set. `alpha` replaces the worldline by
/// a large-mass ramp from phi = 0 to phi = (alpha - 1) c^2; `gamma` sets the
/// channel's amplitude-damping gamma or depolarizing lambda. Throws
/// ValidationError when the parameter does not apply to the scenario.
ScenarioConfig with_parameter(ScenarioConfig config, std::string_view name, double value);

HermitianOperator harmonic_oscillator(double omega, std::size_t levels);
HermitianOperator two_level(double gap);

/// Smallest N with exp(-beta_omega N) < tail.
std::size_t oscillator_levels_for(double beta_omega, double tail = 1e-12);

/// beta dF = ln[sinh(alpha beta_omega / 2) / sinh(beta_omega / 2)] for the
/// untruncated oscillator whose levels are rescaled by alpha.
double oscillator_delta_F_analytic(double beta_omega, double alpha);

/// beta <W> = (alpha - 1) (beta_omega / 2) coth(beta_omega / 2).
double oscillator_mean_work_analytic(double beta_omega, double alpha);

}  // namespace tdfr
