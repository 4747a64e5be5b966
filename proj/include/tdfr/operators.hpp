#pragma once

// Dense complex operator algebra for finite-dimensional internal Hamiltonians.
//
// Everything here is immutable after construction. Operators are stored as
// Eigen dynamic complex matrices; the wrapper types enforce the invariants
// (Hermiticity, unit trace, orthonormal eigenbases) at construction time.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tdfr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// Construction-time tolerances. The defaults are the documented ones; every
/// constructor that checks an invariant accepts an override.
struct Tolerances {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double positivity = 1e-12;
  double orthonormality = 1e-10;
  double unitarity = 1e-10;
  // Relative eigenvalue gap below which levels are treated as degenerate.
  double degeneracy = 1e-10;
};

inline constexpr Tolerances kDefaultTolerances{};

/// Throws ConstructionError unless `m` is a non-empty square matrix of finite entries.
void require_square_finite(const ComplexMatrix& m, const char* what);

double max_abs(const ComplexMatrix& m);
bool is_unitary(const ComplexMatrix& u, double tol = kDefaultTolerances.unitarity);

class HermitianOperator {
 public:
  /// Rejects inputs further than tol*max(1, max|m_ij|) from Hermitian and
  /// symmetrizes the rest, so matrix() is exactly self-adjoint.
  explicit HermitianOperator(const ComplexMatrix& m,
                             double tol = kDefaultTolerances.hermiticity);

  static HermitianOperator diagonal(const std::vector<double>& values);
  static HermitianOperator zero(std::size_t dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

  HermitianOperator scaled(double factor) const;

 private:
  ComplexMatrix m_;
};

/// A set of orthonormal measurement vectors (columns) with an energy value
/// attached to each. Values need not be sorted and the vectors need not
/// diagonalize any particular operator.
struct MeasurementBasis {
  std::vector<double> values;
  ComplexMatrix vectors;

  std::size_t dim() const noexcept { return values.size(); }
};

/// Full eigensystem of a Hermitian operator, eigenvalues ascending.
///
/// Within a degenerate cluster the basis is fixed by projecting the standard
/// basis vectors e_0, e_1, ... (index order) onto the cluster's eigenspace and
/// Gram-Schmidt orthonormalizing them. The same rule is applied to
/// non-degenerate levels, which fixes each eigenvector's phase: its first
/// sufficiently large component is real and positive.
class Spectrum {
 public:
  const std::vector<double>& eigenvalues() const noexcept { return basis_.values; }
  const ComplexMatrix& eigenvectors() const noexcept { return basis_.vectors; }
  const MeasurementBasis& basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return basis_.values.size(); }

  double min_eigenvalue() const { return basis_.values.front(); }
  double max_eigenvalue() const { return basis_.values.back(); }

  /// V diag(f(lambda)) V^dagger.
  template <class F>
  ComplexMatrix apply_function(F&& f) const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::VectorXcd d(n);
    for (Eigen::Index k = 0; k < n; ++k) d(k) = f(basis_.values[static_cast<std::size_t>(k)]);
    return basis_.vectors * d.asDiagonal() * basis_.vectors.adjoint();
  }

  ComplexMatrix reconstruct() const;

 private:
  friend Spectrum spectral_decompose(const HermitianOperator&, const Tolerances&);
  Spectrum() = default;
  MeasurementBasis basis_;
};

Spectrum spectral_decompose(const HermitianOperator& h,
                            const Tolerances& tol = kDefaultTolerances);

/// exp(scale * h) through the spectral decomposition.
ComplexMatrix hermitian_expm(const HermitianOperator& h, Complex scale);
ComplexMatrix hermitian_expm(const Spectrum& spec, Complex scale);

/// Rank-one projector onto eigenvector `index`.
ComplexMatrix projector(const Spectrum& spec, std::size_t index);
ComplexMatrix projector(const MeasurementBasis& basis, std::size_t index);

class DensityOperator {
 public:
  explicit DensityOperator(const ComplexMatrix& m, const Tolerances& tol = kDefaultTolerances);

  static DensityOperator maximally_mixed(std::size_t dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

 private:
  ComplexMatrix m_;
};

}  // namespace tdfr
