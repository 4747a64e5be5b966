#include "tdfr/random.hpp"

#include <cmath>

namespace tdfr {

namespace {

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return g;
}

// Q factor with R's diagonal made positive, which makes the Q Haar-distributed.
ComplexMatrix orthonormal_columns(const ComplexMatrix& g) {
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(g.rows(), g.cols());
  const ComplexMatrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

HermitianOperator random_hermitian(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  const ComplexMatrix g = ginibre(n, n, rng);
  return HermitianOperator((g + g.adjoint()) / (2.0 * std::sqrt(2.0 * static_cast<double>(dim))));
}

HermitianOperator random_hermitian(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_hermitian(dim, rng);
}

ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  return orthonormal_columns(ginibre(n, n, rng));
}

QuantumChannel random_channel(std::size_t dim, std::size_t kraus_count, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  const auto k = static_cast<Eigen::Index>(kraus_count);
  const ComplexMatrix iso = orthonormal_columns(ginibre(k * n, n, rng));
  std::vector<ComplexMatrix> ops;
  ops.reserve(kraus_count);
  for (Eigen::Index j = 0; j < k; ++j) ops.push_back(iso.middleRows(j * n, n));
  return QuantumChannel(std::move(ops));
}

QuantumChannel random_unital_channel(std::size_t dim, std::size_t count, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.1, 1.0);
  std::vector<double> weights(count);
  double total = 0.0;
  for (double& w : weights) total += (w = uniform(rng));
  std::vector<ComplexMatrix> ops;
  ops.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    ops.push_back(std::sqrt(weights[j] / total) * random_unitary(dim, rng));
  }
  return QuantumChannel(std::move(ops));
}

DensityOperator random_density(std::size_t dim, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  const ComplexMatrix a = ginibre(n, n, rng);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(0.5 * (rho + rho.adjoint()));
}

}  // namespace tdfr
