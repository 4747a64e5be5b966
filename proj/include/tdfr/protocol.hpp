#pragma once

// Two-point-measurement (TPM) work statistics and the fluctuation-relation
// estimators built on them.
//
// A run prepares the Gibbs state of H_0, measures H_0, applies a process,
// and measures the final Hamiltonian. Work atoms W_{n,m} = e_n^T - e_m^0
// carry joint probability p_m p_{n|m}.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdfr/channels.hpp"
#include "tdfr/operators.hpp"
#include "tdfr/scenarios.hpp"
#include "tdfr/thermo.hpp"

namespace tdfr {

struct WorkAtom {
  double w = 0.0;
  double prob = 0.0;
};

/// 1e-9 * max(1, spectral_range).
double merge_tolerance_for(double spectral_range);

/// Discrete work distribution: atoms sorted by w, none closer than the merge
/// tolerance, probabilities summing to one.
class WorkDistribution {
 public:
  /// Sorts and merges `atoms` (a merged atom sits at the probability-weighted
  /// mean of its members). Throws ArgumentError for negative probabilities or
  /// a total further than 1e-10 from one.
  WorkDistribution(std::vector<WorkAtom> atoms, double merge_tol);

  const std::vector<WorkAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double merge_tolerance() const noexcept { return merge_tol_; }
  double mean() const;

 private:
  std::vector<WorkAtom> atoms_;
  double merge_tol_;
};

/// p_{n|m} = Tr[Pi_n^final Theta(Pi_m^initial)], rows n, columns m. Rounding
/// negatives down to -1e-12 are clamped to zero and the affected columns
/// renormalized; anything more negative throws ArgumentError.
RealMatrix conditional_probabilities(const MeasurementBasis& initial, const MeasurementBasis& final,
                                     const QuantumChannel& ch);
RealMatrix conditional_probabilities(const Spectrum& initial, const Spectrum& final,
                                     const QuantumChannel& ch);

/// Work atoms for a Gibbs-prepared first measurement, an arbitrary process
/// and an arbitrary final measurement basis.
WorkDistribution tpm_work_distribution(const ThermalEnsemble& initial, const MeasurementBasis& final,
                                       const QuantumChannel& ch);

WorkDistribution work_distribution_flat(const HermitianOperator& h0, const HermitianOperator& h_final,
                                        const QuantumChannel& ch, double beta);

/// Time-independent H_int on a worldline: atoms ((alpha - 1) e_m^0, p_m).
WorkDistribution work_distribution_dilated(const Spectrum& spec0, double alpha_final, double beta);

/// <exp(-beta W)>.
double jarzynski_lhs(const WorkDistribution& wd, double beta);

/// Tr(G_Theta omega_T) with G_Theta = Theta(rho_*) - rho_*.
double unitality_correction(const HermitianOperator& h_final, const QuantumChannel& ch, double beta);

/// e^{-beta dF} Tr[omega_T Theta(1)] = e^{-beta dF} [1 + d Tr(G_Theta omega_T)].
/// Reduces to e^{-beta dF} for unital channels.
double generalized_jarzynski_rhs(const HermitianOperator& h_final, const QuantumChannel& ch,
                                 double beta, double delta_F);

/// beta (<W> - dF).
double entropy_production(double mean_work, double delta_F, double beta);

struct MonteCarloSummary {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;   // sample mean of exp(-beta W)
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  double exact = 0.0;      // jarzynski_lhs of the same distribution
};

struct ProtocolReport {
  std::string scenario_id;
  Pipeline pipeline = Pipeline::Dilated;
  std::size_t dim = 0;
  double beta = 0.0;
  double alpha_final = 1.0;
  double tau_total = 0.0;
  double mean_work = 0.0;
  double delta_F = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double entropy_production = 0.0;
  std::optional<FinalBasis> final_basis;  // appendix pipeline only
  std::size_t steps = 0;

  // Not part of the tabular report.
  std::vector<WorkAtom> work_atoms;
  double mean_initial_energy = 0.0;  // thermal <e^0>
  double truncation_error = 0.0;
  std::optional<MonteCarloSummary> monte_carlo;
};

ProtocolReport run_protocol(const Scenario& scenario);
ProtocolReport run_protocol(const ScenarioConfig& config);

/// n i.i.d. draws from the atoms. Deterministic in (wd, n, seed) on every
/// platform: uniforms come straight from the top 53 bits of mt19937_64.
std::vector<double> sample_outcomes(const WorkDistribution& wd, std::size_t n, std::uint64_t seed);

MonteCarloSummary monte_carlo_jarzynski(const WorkDistribution& wd, double beta, std::size_t n,
                                        std::uint64_t seed);

}  // namespace tdfr
