#include "tdfr/thermo.hpp"

#include <algorithm>
#include <cmath>

#include "tdfr/errors.hpp"

namespace tdfr {

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ArgumentError("inverse temperature beta must be positive and finite");
  }
}

}  // namespace

double log_partition_function(std::span<const double> energies, double beta) {
  require_beta(beta);
  if (energies.empty()) throw ArgumentError("partition function of an empty spectrum");
  const double e_min = *std::min_element(energies.begin(), energies.end());
  double sum = 0.0;
  for (double e : energies) sum += std::exp(-beta * (e - e_min));
  return -beta * e_min + std::log(sum);
}

double partition_function(std::span<const double> energies, double beta) {
  return std::exp(log_partition_function(energies, beta));
}

double partition_function(const Spectrum& spec, double beta) {
  return partition_function(spec.eigenvalues(), beta);
}

double free_energy(std::span<const double> energies, double beta) {
  return -log_partition_function(energies, beta) / beta;
}

ThermalEnsemble::ThermalEnsemble(Spectrum spectrum, double beta)
    : spectrum_(std::move(spectrum)), beta_(beta) {
  const auto& e = spectrum_.eigenvalues();
  log_z_ = log_partition_function(e, beta_);
  probs_.resize(e.size());
  double total = 0.0;
  for (std::size_t m = 0; m < e.size(); ++m) {
    probs_[m] = std::exp(-beta_ * e[m] - log_z_);
    total += probs_[m];
  }
  // Absorb the last-bit rounding of exp/log so the weights sum to one.
  for (double& p : probs_) p /= total;
}

double ThermalEnsemble::z() const { return std::exp(log_z_); }

double ThermalEnsemble::mean_energy() const {
  const auto& e = spectrum_.eigenvalues();
  double mean = 0.0;
  for (std::size_t m = 0; m < e.size(); ++m) mean += probs_[m] * e[m];
  return mean;
}

DensityOperator ThermalEnsemble::density_operator() const {
  const auto& e = spectrum_.eigenvalues();
  const auto& v = spectrum_.eigenvectors();
  ComplexMatrix rho = ComplexMatrix::Zero(v.rows(), v.cols());
  for (std::size_t m = 0; m < e.size(); ++m) {
    const auto col = v.col(static_cast<Eigen::Index>(m));
    rho += probs_[m] * (col * col.adjoint());
  }
  return DensityOperator(rho);
}

ThermalEnsemble thermal_state(const HermitianOperator& h, double beta) {
  require_beta(beta);
  return ThermalEnsemble(spectral_decompose(h), beta);
}

double free_energy_difference(const Spectrum& spec0, double alpha_final, double beta) {
  require_beta(beta);
  if (!(alpha_final > 0.0)) throw ArgumentError("free_energy_difference: alpha must be positive");
  if (alpha_final == 1.0) return 0.0;
  std::vector<double> scaled(spec0.eigenvalues());
  for (double& e : scaled) e *= alpha_final;
  return -(log_partition_function(scaled, beta) - log_partition_function(spec0.eigenvalues(), beta)) /
         beta;
}

}  // namespace tdfr
