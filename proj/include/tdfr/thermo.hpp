#pragma once

// Gibbs ensembles of a fixed inverse temperature beta.
//
// All sums over Boltzmann factors are taken with the lowest level factored
// out, so spectra far from zero do not overflow.

#include <span>
#include <vector>

#include "tdfr/operators.hpp"

namespace tdfr {

/// ln sum_m exp(-beta e_m), computed as -beta e_min + ln sum_m exp(-beta (e_m - e_min)).
double log_partition_function(std::span<const double> energies, double beta);

double partition_function(const Spectrum& spec, double beta);
double partition_function(std::span<const double> energies, double beta);

/// -ln(Z)/beta.
double free_energy(std::span<const double> energies, double beta);

class ThermalEnsemble {
 public:
  ThermalEnsemble(Spectrum spectrum, double beta);

  double beta() const noexcept { return beta_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  /// Gibbs weights p_m, aligned with spectrum().eigenvalues().
  const std::vector<double>& probs() const noexcept { return probs_; }
  double log_z() const noexcept { return log_z_; }
  double z() const;
  double free_energy() const noexcept { return -log_z_ / beta_; }
  double mean_energy() const;

  /// e^{-beta H}/Z as a density operator.
  DensityOperator density_operator() const;

 private:
  Spectrum spectrum_;
  double beta_;
  std::vector<double> probs_;
  double log_z_;
};

ThermalEnsemble thermal_state(const HermitianOperator& h, double beta);

/// F_tau - F_0 when every level of `spec0` is rescaled by alpha_final.
/// Exactly zero for alpha_final == 1.
double free_energy_difference(const Spectrum& spec0, double alpha_final, double beta);

}  // namespace tdfr
