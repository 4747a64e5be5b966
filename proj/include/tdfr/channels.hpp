#pragma once

// Quantum processes acting on the internal degrees of freedom: Kraus maps,
// proper-time unitaries and time-ordered propagators along a worldline.

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "tdfr/operators.hpp"
#include "tdfr/spacetime.hpp"

namespace tdfr {

/// A CPTP map stored as its Kraus family {K_j}.
class QuantumChannel {
 public:
  /// Throws ConstructionError unless the family is non-empty, square,
  /// equal-dimensional, finite and trace preserving (sum K^dag K = 1 within tol).
  explicit QuantumChannel(std::vector<ComplexMatrix> kraus_ops,
                          double tol = kDefaultTolerances.unitarity);

  const std::vector<ComplexMatrix>& kraus_ops() const noexcept { return kraus_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(kraus_.front().rows()); }
  /// sum K K^dag = 1 within the construction tolerance.
  bool is_unital() const noexcept { return unital_; }

  /// sum_j K_j x K_j^dag for an arbitrary operator x.
  ComplexMatrix map(const ComplexMatrix& x) const;

 private:
  std::vector<ComplexMatrix> kraus_;
  bool unital_ = false;
};

QuantumChannel unitary_channel(const ComplexMatrix& u, double tol = kDefaultTolerances.unitarity);
QuantumChannel identity_channel(std::size_t dim);
/// Qubit amplitude damping: K0 = diag(1, sqrt(1-gamma)), K1 = sqrt(gamma)|0><1|.
QuantumChannel amplitude_damping(double gamma);
/// rho -> (1 - lambda) rho + lambda 1/d, written with the d^2 Weyl operators.
QuantumChannel depolarizing(std::size_t dim, double lambda);

DensityOperator apply(const QuantumChannel& ch, const DensityOperator& rho);

/// G = Theta(rho_*) - rho_* with rho_* the maximally mixed state.
ComplexMatrix unitality_deviation(const QuantumChannel& ch);

/// exp(-i H tau).
ComplexMatrix proper_time_propagator(const HermitianOperator& h_int, double tau);

/// H_int as a function of proper time, piecewise constant: segment k holds
/// from tau_starts[k] until the next start. tau_starts[0] must be 0.
class PiecewiseConstantHamiltonian {
 public:
  PiecewiseConstantHamiltonian(std::vector<double> tau_starts,
                               std::vector<HermitianOperator> hamiltonians);
  explicit PiecewiseConstantHamiltonian(const HermitianOperator& constant);

  std::size_t segment_at(double tau) const;
  const Spectrum& spectrum(std::size_t segment) const { return spectra_[segment]; }
  const HermitianOperator& hamiltonian(std::size_t segment) const { return hamiltonians_[segment]; }
  const std::vector<double>& tau_starts() const noexcept { return tau_starts_; }
  std::size_t dim() const { return hamiltonians_.front().dim(); }

 private:
  std::vector<double> tau_starts_;
  std::vector<HermitianOperator> hamiltonians_;
  std::vector<Spectrum> spectra_;
};

/// Arbitrary tau -> H_int(tau); diagonalized afresh at every step.
using HamiltonianFunction = std::function<HermitianOperator(double tau)>;

using HamiltonianSchedule = std::variant<PiecewiseConstantHamiltonian, HamiltonianFunction>;

HermitianOperator hamiltonian_at(const HamiltonianSchedule& schedule, double tau);

struct PropagatorSchedule {
  HamiltonianSchedule h_int;
  DilationProfile dilation;
  std::size_t steps = 1;
};

/// Left-ordered product of exp(-i H_int(tau_mid,k) dtau_k) over `steps`
/// uniform laboratory-time steps, with dtau_k taken from the dilation
/// profile. Later steps multiply on the left.
ComplexMatrix time_ordered_propagator(const PropagatorSchedule& sched);

}  // namespace tdfr
