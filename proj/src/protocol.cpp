#include "tdfr/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "tdfr/errors.hpp"

namespace tdfr {

namespace {

constexpr double kClampTolerance = 1e-12;
constexpr double kNormalizationTolerance = 1e-10;

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ArgumentError("inverse temperature beta must be positive and finite");
  }
}

double range_of(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

void require_orthonormal(const MeasurementBasis& b, const char* which) {
  if (static_cast<std::size_t>(b.vectors.cols()) != b.dim() ||
      static_cast<std::size_t>(b.vectors.rows()) != b.dim()) {
    throw ArgumentError(std::string(which) + " measurement basis has inconsistent shape");
  }
  const auto n = static_cast<Eigen::Index>(b.dim());
  if (max_abs(b.vectors.adjoint() * b.vectors - ComplexMatrix::Identity(n, n)) >
      kDefaultTolerances.orthonormality) {
    throw ArgumentError(std::string(which) + " measurement basis is not orthonormal");
  }
}

}  // namespace

double merge_tolerance_for(double spectral_range) {
  return 1e-9 * std::max(1.0, spectral_range);
}

WorkDistribution::WorkDistribution(std::vector<WorkAtom> atoms, double merge_tol)
    : merge_tol_(merge_tol) {
  if (atoms.empty()) throw ArgumentError("work distribution has no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.w) || !std::isfinite(a.prob)) {
      throw ArgumentError("work distribution atom is not finite");
    }
    if (a.prob < 0.0) throw ArgumentError("work distribution atom has negative probability");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw ArgumentError("work distribution probabilities sum to " + std::to_string(total));
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const WorkAtom& a, const WorkAtom& b) { return a.w < b.w; });

  // Greedy clustering: an atom joins the current cluster while it lies within
  // merge_tol of the cluster's first member.
  std::size_t start = 0;
  while (start < atoms.size()) {
    std::size_t stop = start + 1;
    while (stop < atoms.size() && atoms[stop].w - atoms[start].w < merge_tol_) ++stop;
    double prob = 0.0;
    double weighted = 0.0;
    for (std::size_t k = start; k < stop; ++k) {
      prob += atoms[k].prob;
      weighted += atoms[k].prob * atoms[k].w;
    }
    const double w = prob > 0.0 ? weighted / prob : atoms[start].w;
    atoms_.push_back({w, prob});
    start = stop;
  }
}

double WorkDistribution::mean() const {
  double mean = 0.0;
  for (const auto& a : atoms_) mean += a.prob * a.w;
  return mean;
}

RealMatrix conditional_probabilities(const MeasurementBasis& initial, const MeasurementBasis& final,
                                     const QuantumChannel& ch) {
  if (initial.dim() != final.dim() || initial.dim() != ch.dim()) {
    throw ArgumentError("conditional_probabilities: dimension mismatch (" +
                        std::to_string(initial.dim()) + ", " + std::to_string(final.dim()) + ", " +
                        std::to_string(ch.dim()) + ")");
  }
  require_orthonormal(initial, "initial");
  require_orthonormal(final, "final");
  const auto n = static_cast<Eigen::Index>(initial.dim());
  RealMatrix p(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const ComplexMatrix evolved = ch.map(projector(initial, static_cast<std::size_t>(m)));
    bool clamped = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto f = final.vectors.col(k);
      double value = f.dot(evolved * f).real();
      if (value < 0.0) {
        if (value < -kClampTolerance) {
          throw ArgumentError("conditional_probabilities: negative probability " +
                              std::to_string(value) + " (channel is not positive)");
        }
        value = 0.0;
        clamped = true;
      }
      p(k, m) = value;
    }
    if (clamped) p.col(m) /= p.col(m).sum();
  }
  return p;
}

RealMatrix conditional_probabilities(const Spectrum& initial, const Spectrum& final,
                                     const QuantumChannel& ch) {
  return conditional_probabilities(initial.basis(), final.basis(), ch);
}

WorkDistribution tpm_work_distribution(const ThermalEnsemble& initial, const MeasurementBasis& final,
                                       const QuantumChannel& ch) {
  const auto& e0 = initial.spectrum().eigenvalues();
  const RealMatrix cond = conditional_probabilities(initial.spectrum().basis(), final, ch);
  const auto& p0 = initial.probs();
  std::vector<WorkAtom> atoms;
  atoms.reserve(e0.size() * final.dim());
  for (std::size_t m = 0; m < e0.size(); ++m) {
    for (std::size_t k = 0; k < final.dim(); ++k) {
      const double prob = p0[m] * cond(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
      if (prob > 0.0) atoms.push_back({final.values[k] - e0[m], prob});
    }
  }
  return WorkDistribution(std::move(atoms),
                          merge_tolerance_for(std::max(range_of(e0), range_of(final.values))));
}

WorkDistribution work_distribution_flat(const HermitianOperator& h0, const HermitianOperator& h_final,
                                        const QuantumChannel& ch, double beta) {
  require_beta(beta);
  const ThermalEnsemble initial = thermal_state(h0, beta);
  return tpm_work_distribution(initial, spectral_decompose(h_final).basis(), ch);
}

WorkDistribution work_distribution_dilated(const Spectrum& spec0, double alpha_final, double beta) {
  require_beta(beta);
  if (!(alpha_final > 0.0)) throw ArgumentError("work_distribution_dilated: alpha must be positive");
  const ThermalEnsemble ensemble(spec0, beta);
  const auto& e0 = spec0.eigenvalues();
  std::vector<WorkAtom> atoms;
  atoms.reserve(e0.size());
  for (std::size_t m = 0; m < e0.size(); ++m) {
    atoms.push_back({(alpha_final - 1.0) * e0[m], ensemble.probs()[m]});
  }
  const double range = range_of(e0) * std::max(1.0, alpha_final);
  return WorkDistribution(std::move(atoms), merge_tolerance_for(range));
}

double jarzynski_lhs(const WorkDistribution& wd, double beta) {
  require_beta(beta);
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& a : wd.atoms()) {
    if (a.prob > 0.0) shift = std::max(shift, -beta * a.w);
  }
  double sum = 0.0;
  for (const auto& a : wd.atoms()) {
    if (a.prob > 0.0) sum += a.prob * std::exp(-beta * a.w - shift);
  }
  return std::exp(shift) * sum;
}

double unitality_correction(const HermitianOperator& h_final, const QuantumChannel& ch, double beta) {
  if (h_final.dim() != ch.dim()) {
    throw ArgumentError("unitality_correction: Hamiltonian and channel dimensions differ");
  }
  const ThermalEnsemble omega_t = thermal_state(h_final, beta);
  return (unitality_deviation(ch) * omega_t.density_operator().matrix()).trace().real();
}

double generalized_jarzynski_rhs(const HermitianOperator& h_final, const QuantumChannel& ch,
                                 double beta, double delta_F) {
  require_beta(beta);
  const double base = std::exp(-beta * delta_F);
  if (ch.is_unital()) return base;
  const double d = static_cast<double>(ch.dim());
  return base * (1.0 + d * unitality_correction(h_final, ch, beta));
}

double entropy_production(double mean_work, double delta_F, double beta) {
  require_beta(beta);
  return beta * (mean_work - delta_F);
}

namespace {

void finish(ProtocolReport& r, const WorkDistribution& wd, double beta) {
  r.beta = beta;
  r.mean_work = wd.mean();
  r.lhs = jarzynski_lhs(wd, r.beta);
  r.residual = r.lhs - r.rhs;
  r.entropy_production = entropy_production(r.mean_work, r.delta_F, r.beta);
  r.work_atoms = wd.atoms();
}

HermitianOperator lab_frame(const HermitianOperator& h, double alpha) {
  return alpha == 1.0 ? h : h.scaled(alpha);
}

ProtocolReport run_flat(const Scenario& s) {
  ProtocolReport r;
  const HermitianOperator& h_final = s.h_final ? *s.h_final : s.h_int;
  const QuantumChannel ch = s.channel ? *s.channel : identity_channel(s.h_int.dim());
  const ThermalEnsemble initial = thermal_state(s.h_int, s.beta);
  const Spectrum spec_final = spectral_decompose(h_final);
  const WorkDistribution wd = tpm_work_distribution(initial, spec_final.basis(), ch);

  r.delta_F = free_energy(spec_final.eigenvalues(), s.beta) - initial.free_energy();
  r.rhs = generalized_jarzynski_rhs(h_final, ch, s.beta, r.delta_F);
  r.mean_initial_energy = initial.mean_energy();
  finish(r, wd, s.beta);
  return r;
}

ProtocolReport run_dilated(const Scenario& s) {
  ProtocolReport r;
  const DilationProfile& profile = *s.profile;
  const double alpha_start = profile.initial_alpha();
  r.alpha_final = profile.final_alpha() / alpha_start;
  r.tau_total = profile.tau_total();

  const Spectrum spec0 = spectral_decompose(lab_frame(s.h_int, alpha_start));
  const ThermalEnsemble initial(spec0, s.beta);
  const WorkDistribution wd = work_distribution_dilated(spec0, r.alpha_final, s.beta);
  r.delta_F = free_energy_difference(spec0, r.alpha_final, s.beta);
  r.rhs = std::exp(-s.beta * r.delta_F);
  r.mean_initial_energy = initial.mean_energy();
  finish(r, wd, s.beta);
  return r;
}

ProtocolReport run_appendix(const Scenario& s) {
  ProtocolReport r;
  const DilationProfile& profile = *s.profile;
  const PiecewiseConstantHamiltonian& schedule = *s.schedule;
  const double alpha_start = profile.initial_alpha();
  const double alpha_end = profile.final_alpha();
  r.alpha_final = alpha_end / alpha_start;
  r.tau_total = profile.tau_total();
  r.steps = s.steps;
  r.final_basis = s.final_basis;

  const ThermalEnsemble initial =
      thermal_state(lab_frame(schedule.hamiltonian(0), alpha_start), s.beta);
  const ComplexMatrix u = time_ordered_propagator({schedule, profile, s.steps});
  const QuantumChannel evolution({u});
  const HermitianOperator h_tau =
      lab_frame(schedule.hamiltonian(schedule.segment_at(r.tau_total)), alpha_end);

  MeasurementBasis final;
  if (s.final_basis == FinalBasis::Evolved) {
    final.vectors = u * initial.spectrum().eigenvectors();
    final.values.resize(initial.spectrum().dim());
    for (Eigen::Index n = 0; n < final.vectors.cols(); ++n) {
      const auto psi = final.vectors.col(n);
      final.values[static_cast<std::size_t>(n)] = psi.dot(h_tau.matrix() * psi).real();
    }
  } else {
    final = spectral_decompose(h_tau).basis();
  }

  const WorkDistribution wd = tpm_work_distribution(initial, final, evolution);
  r.delta_F = free_energy(final.values, s.beta) - initial.free_energy();
  r.rhs = std::exp(-s.beta * r.delta_F);
  r.mean_initial_energy = initial.mean_energy();
  finish(r, wd, s.beta);
  return r;
}

}  // namespace

ProtocolReport run_protocol(const Scenario& scenario) {
  require_beta(scenario.beta);
  ProtocolReport r;
  switch (scenario.pipeline) {
    case Pipeline::Flat:
      r = run_flat(scenario);
      break;
    case Pipeline::Dilated:
      r = run_dilated(scenario);
      break;
    case Pipeline::Appendix:
      r = run_appendix(scenario);
      break;
  }
  r.scenario_id = scenario.id;
  r.pipeline = scenario.pipeline;
  r.dim = scenario.h_int.dim();
  r.beta = scenario.beta;
  r.truncation_error = scenario.truncation_error;
  if (scenario.mc_samples > 0) {
    const WorkDistribution wd(r.work_atoms, 0.0);
    r.monte_carlo = monte_carlo_jarzynski(wd, scenario.beta, scenario.mc_samples, scenario.seed);
  }
  return r;
}

ProtocolReport run_protocol(const ScenarioConfig& config) {
  return run_protocol(build_scenario(config));
}

std::vector<double> sample_outcomes(const WorkDistribution& wd, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample_outcomes: n must be >= 1");
  const auto& atoms = wd.atoms();
  std::vector<double> cdf(atoms.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) cdf[k] = (acc += atoms[k].prob);

  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    idx = std::min(idx, atoms.size() - 1);
    // Zero-probability atoms sit on flat stretches of the cdf and are never hit.
    out.push_back(atoms[idx].w);
  }
  return out;
}

MonteCarloSummary monte_carlo_jarzynski(const WorkDistribution& wd, double beta, std::size_t n,
                                        std::uint64_t seed) {
  require_beta(beta);
  const std::vector<double> draws = sample_outcomes(wd, n, seed);
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double w : draws) {
    const double x = std::exp(-beta * w);
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  MonteCarloSummary s;
  s.samples = n;
  s.seed = seed;
  s.estimate = mean;
  s.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  s.exact = jarzynski_lhs(wd, beta);
  return s;
}

}  // namespace tdfr
