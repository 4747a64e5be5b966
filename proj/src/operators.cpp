#include "tdfr/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tdfr/errors.hpp"

namespace tdfr {

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ConstructionError(std::string(what) + ": matrix must be square and non-empty, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        throw ConstructionError(std::string(what) + ": non-finite entry at (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
      }
    }
  }
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const auto id = ComplexMatrix::Identity(u.rows(), u.cols());
  return max_abs(u.adjoint() * u - id) <= tol && max_abs(u * u.adjoint() - id) <= tol;
}

HermitianOperator::HermitianOperator(const ComplexMatrix& m, double tol) {
  require_square_finite(m, "HermitianOperator");
  const double deviation = max_abs(m - m.adjoint());
  if (deviation > tol * std::max(1.0, max_abs(m))) {
    throw ConstructionError("HermitianOperator: matrix is not Hermitian (max |H - H^dagger| = " +
                            std::to_string(deviation) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::diagonal(const std::vector<double>& values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) {
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = values[k];
  }
  return HermitianOperator(m);
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return HermitianOperator(ComplexMatrix::Zero(n, n));
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(m_ * factor);
}

ComplexMatrix Spectrum::reconstruct() const {
  return apply_function([](double x) { return Complex(x, 0.0); });
}

namespace {

// Residual norm below which a projected standard basis vector is skipped.
constexpr double kAcceptNorm = 1e-3;

// Deterministic orthonormal basis of the column span of `cluster`.
ComplexMatrix canonical_cluster_basis(const ComplexMatrix& cluster) {
  const Eigen::Index n = cluster.rows();
  const Eigen::Index k = cluster.cols();
  const ComplexMatrix p = cluster * cluster.adjoint();
  ComplexMatrix out(n, k);
  Eigen::Index accepted = 0;
  for (Eigen::Index s = 0; s < n && accepted < k; ++s) {
    Eigen::VectorXcd v = p.col(s);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index a = 0; a < accepted; ++a) {
        v -= out.col(a) * out.col(a).dot(v);
      }
    }
    const double norm = v.norm();
    if (norm <= kAcceptNorm) continue;
    v /= norm;
    // Re-project to stay inside the eigenspace after normalization.
    v = p * v;
    v /= v.norm();
    out.col(accepted++) = v;
  }
  if (accepted < k) {
    throw ConstructionError("spectral_decompose: could not build canonical degenerate basis");
  }
  // One more orthonormalization sweep against accumulated rounding.
  for (Eigen::Index a = 0; a < k; ++a) {
    Eigen::VectorXcd v = out.col(a);
    for (Eigen::Index b = 0; b < a; ++b) v -= out.col(b) * out.col(b).dot(v);
    out.col(a) = v / v.norm();
  }
  return out;
}

}  // namespace

Spectrum spectral_decompose(const HermitianOperator& h, const Tolerances& tol) {
  const ComplexMatrix& m = h.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw ConstructionError("spectral_decompose: eigen solver did not converge");
  }
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const ComplexMatrix& evecs = solver.eigenvectors();
  const Eigen::Index n = evals.size();

  const double range = evals(n - 1) - evals(0);
  const double magnitude = std::max(std::abs(evals(0)), std::abs(evals(n - 1)));
  const double gap_tol = tol.degeneracy * std::max(range, magnitude);

  ComplexMatrix vectors(n, n);
  std::vector<double> values(static_cast<std::size_t>(n));
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && evals(stop) - evals(stop - 1) <= gap_tol) ++stop;
    const ComplexMatrix block = canonical_cluster_basis(evecs.middleCols(start, stop - start));
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      vectors.col(start + c) = block.col(c);
      values[static_cast<std::size_t>(start + c)] =
          block.col(c).dot(m * block.col(c)).real();
    }
    start = stop;
  }

  // Rayleigh quotients inside a cluster can differ in the last bits; keep ascending.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  Spectrum spec;
  spec.basis_.values.resize(values.size());
  spec.basis_.vectors.resize(n, n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    spec.basis_.values[k] = values[order[k]];
    spec.basis_.vectors.col(static_cast<Eigen::Index>(k)) =
        vectors.col(static_cast<Eigen::Index>(order[k]));
  }
  return spec;
}

ComplexMatrix hermitian_expm(const Spectrum& spec, Complex scale) {
  if (!std::isfinite(scale.real()) || !std::isfinite(scale.imag())) {
    throw ArgumentError("hermitian_expm: scale must be finite");
  }
  return spec.apply_function([scale](double x) { return std::exp(scale * x); });
}

ComplexMatrix hermitian_expm(const HermitianOperator& h, Complex scale) {
  return hermitian_expm(spectral_decompose(h), scale);
}

ComplexMatrix projector(const MeasurementBasis& basis, std::size_t index) {
  if (index >= basis.dim()) {
    throw ArgumentError("projector: index " + std::to_string(index) + " out of range for dim " +
                        std::to_string(basis.dim()));
  }
  const auto v = basis.vectors.col(static_cast<Eigen::Index>(index));
  return v * v.adjoint();
}

ComplexMatrix projector(const Spectrum& spec, std::size_t index) {
  return projector(spec.basis(), index);
}

DensityOperator::DensityOperator(const ComplexMatrix& m, const Tolerances& tol) {
  require_square_finite(m, "DensityOperator");
  if (max_abs(m - m.adjoint()) > tol.hermiticity) {
    throw ConstructionError("DensityOperator: matrix is not Hermitian");
  }
  const double trace = m.trace().real();
  if (std::abs(trace - 1.0) > tol.trace) {
    throw ConstructionError("DensityOperator: trace is " + std::to_string(trace) + ", expected 1");
  }
  m_ = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues()(0) < -tol.positivity) {
    throw ConstructionError("DensityOperator: negative eigenvalue " +
                            std::to_string(solver.eigenvalues()(0)));
  }
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityOperator(ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

}  // namespace tdfr
