#include "tdfr/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tdfr/errors.hpp"

namespace tdfr {

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus_ops, double tol)
    : kraus_(std::move(kraus_ops)) {
  if (kraus_.empty()) throw ConstructionError("QuantumChannel: empty Kraus family");
  const Eigen::Index n = kraus_.front().rows();
  ComplexMatrix tp = ComplexMatrix::Zero(n, n);
  ComplexMatrix un = ComplexMatrix::Zero(n, n);
  for (const auto& k : kraus_) {
    require_square_finite(k, "QuantumChannel");
    if (k.rows() != n) throw ConstructionError("QuantumChannel: Kraus operators differ in dimension");
    tp += k.adjoint() * k;
    un += k * k.adjoint();
  }
  const auto id = ComplexMatrix::Identity(n, n);
  const double tp_dev = max_abs(tp - id);
  if (tp_dev > tol) {
    throw ConstructionError("QuantumChannel: not trace preserving (max |sum K^dag K - 1| = " +
                            std::to_string(tp_dev) + ")");
  }
  unital_ = max_abs(un - id) <= tol;
}

ComplexMatrix QuantumChannel::map(const ComplexMatrix& x) const {
  if (x.rows() != kraus_.front().rows() || x.cols() != x.rows()) {
    throw ArgumentError("QuantumChannel: operator dimension " + std::to_string(x.rows()) +
                        " does not match channel dimension " + std::to_string(dim()));
  }
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& k : kraus_) out.noalias() += k * x * k.adjoint();
  return out;
}

QuantumChannel unitary_channel(const ComplexMatrix& u, double tol) {
  require_square_finite(u, "unitary_channel");
  if (!is_unitary(u, tol)) throw ArgumentError("unitary_channel: matrix is not unitary");
  return QuantumChannel({u}, tol);
}

QuantumChannel identity_channel(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return QuantumChannel({ComplexMatrix::Identity(n, n)});
}

QuantumChannel amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ArgumentError("amplitude_damping: gamma must lie in [0, 1]");
  }
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return QuantumChannel({k0, k1});
}

QuantumChannel depolarizing(std::size_t dim, double lambda) {
  if (dim == 0) throw ArgumentError("depolarizing: dimension must be positive");
  const double d = static_cast<double>(dim);
  // sum over all d^2 Weyl operators of W rho W^dag equals d * Tr(rho) * 1.
  const double lambda_max = dim == 1 ? 1.0 : d * d / (d * d - 1.0);
  if (!(lambda >= 0.0 && lambda <= lambda_max)) {
    throw ArgumentError("depolarizing: lambda out of the completely positive range");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / d);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(dim * dim);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double weight = (a == 0 && b == 0) ? 1.0 - lambda + lambda / (d * d) : lambda / (d * d);
      if (weight == 0.0) continue;
      // W_ab = X^a Z^b: |j> -> omega^{b j} |j + a mod d>.
      ComplexMatrix w = ComplexMatrix::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        w((j + a) % n, j) = std::pow(omega, static_cast<double>(b * j));
      }
      kraus.push_back(std::sqrt(weight) * w);
    }
  }
  return QuantumChannel(std::move(kraus));
}

DensityOperator apply(const QuantumChannel& ch, const DensityOperator& rho) {
  if (rho.dim() != ch.dim()) {
    throw ArgumentError("apply: state dimension " + std::to_string(rho.dim()) +
                        " does not match channel dimension " + std::to_string(ch.dim()));
  }
  Tolerances tol;
  tol.trace = 1e-10;
  tol.positivity = 1e-10;
  tol.hermiticity = 1e-10;
  return DensityOperator(ch.map(rho.matrix()), tol);
}

ComplexMatrix unitality_deviation(const QuantumChannel& ch) {
  const auto n = static_cast<Eigen::Index>(ch.dim());
  const ComplexMatrix rho_star = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  ComplexMatrix g = ch.map(rho_star) - rho_star;
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix proper_time_propagator(const HermitianOperator& h_int, double tau) {
  return hermitian_expm(h_int, Complex(0.0, -tau));
}

PiecewiseConstantHamiltonian::PiecewiseConstantHamiltonian(std::vector<double> tau_starts,
                                                           std::vector<HermitianOperator> hamiltonians)
    : tau_starts_(std::move(tau_starts)), hamiltonians_(std::move(hamiltonians)) {
  if (hamiltonians_.empty() || tau_starts_.size() != hamiltonians_.size()) {
    throw ArgumentError("piecewise Hamiltonian: need one start time per segment");
  }
  if (tau_starts_.front() != 0.0) throw ArgumentError("piecewise Hamiltonian: first segment must start at 0");
  for (std::size_t k = 1; k < tau_starts_.size(); ++k) {
    if (!(tau_starts_[k] > tau_starts_[k - 1])) {
      throw ArgumentError("piecewise Hamiltonian: segment starts must be strictly increasing");
    }
  }
  spectra_.reserve(hamiltonians_.size());
  for (const auto& h : hamiltonians_) {
    if (h.dim() != hamiltonians_.front().dim()) {
      throw ArgumentError("piecewise Hamiltonian: segments differ in dimension");
    }
    spectra_.push_back(spectral_decompose(h));
  }
}

PiecewiseConstantHamiltonian::PiecewiseConstantHamiltonian(const HermitianOperator& constant)
    : PiecewiseConstantHamiltonian(std::vector<double>{0.0}, std::vector<HermitianOperator>{constant}) {}

std::size_t PiecewiseConstantHamiltonian::segment_at(double tau) const {
  const auto it = std::upper_bound(tau_starts_.begin(), tau_starts_.end(), tau);
  return it == tau_starts_.begin() ? 0 : static_cast<std::size_t>(it - tau_starts_.begin()) - 1;
}

HermitianOperator hamiltonian_at(const HamiltonianSchedule& schedule, double tau) {
  if (const auto* pw = std::get_if<PiecewiseConstantHamiltonian>(&schedule)) {
    return pw->hamiltonian(pw->segment_at(tau));
  }
  return std::get<HamiltonianFunction>(schedule)(tau);
}

ComplexMatrix time_ordered_propagator(const PropagatorSchedule& sched) {
  if (sched.steps < 1) throw ArgumentError("time_ordered_propagator: steps must be >= 1");
  const auto& profile = sched.dilation;
  const double t0 = profile.t_start();
  const double dt = (profile.t_end() - t0) / static_cast<double>(sched.steps);

  ComplexMatrix u;
  double tau_prev = 0.0;
  for (std::size_t k = 0; k < sched.steps; ++k) {
    const double t_next = k + 1 == sched.steps ? profile.t_end() : t0 + dt * static_cast<double>(k + 1);
    const double tau_next = profile.tau_at(t_next);
    const double dtau = tau_next - tau_prev;
    const double tau_mid = 0.5 * (tau_prev + tau_next);

    ComplexMatrix step;
    if (const auto* pw = std::get_if<PiecewiseConstantHamiltonian>(&sched.h_int)) {
      step = hermitian_expm(pw->spectrum(pw->segment_at(tau_mid)), Complex(0.0, -dtau));
    } else {
      step = hermitian_expm(std::get<HamiltonianFunction>(sched.h_int)(tau_mid), Complex(0.0, -dtau));
    }
    u = k == 0 ? step : ComplexMatrix(step * u);
    tau_prev = tau_next;
  }
  return u;
}

}  // namespace tdfr
