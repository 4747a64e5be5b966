#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tdfr/errors.hpp"
#include "tdfr/operators.hpp"
#include "tdfr/random.hpp"

using namespace tdfr;

namespace {

ComplexMatrix sigma_x() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

}  // namespace

TEST_CASE("hermitian operator construction") {
  CHECK(HermitianOperator(sigma_x()).dim() == 2);

  ComplexMatrix almost = sigma_x();
  almost(0, 1) += 1e-14;
  const HermitianOperator h(almost);
  CHECK(max_abs(h.matrix() - h.matrix().adjoint()) == 0.0);

  ComplexMatrix skew = sigma_x();
  skew(0, 1) = Complex(0.0, 1.0);
  CHECK_THROWS_AS(HermitianOperator{skew}, ConstructionError);

  CHECK_THROWS_AS(HermitianOperator{ComplexMatrix::Zero(2, 3)}, ConstructionError);
  CHECK_THROWS_AS(HermitianOperator{ComplexMatrix(0, 0)}, ConstructionError);
  ComplexMatrix bad = identity(2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(HermitianOperator{bad}, ConstructionError);
}

TEST_CASE("spectral decomposition examples") {
  SUBCASE("diagonal input keeps the standard basis") {
    const Spectrum s = spectral_decompose(HermitianOperator::diagonal({0.0, 0.25}));
    CHECK(s.eigenvalues() == std::vector<double>{0.0, 0.25});
    CHECK(max_abs(s.eigenvectors() - identity(2)) == 0.0);
  }
  SUBCASE("sigma_x") {
    const Spectrum s = spectral_decompose(HermitianOperator(sigma_x()));
    CHECK(s.eigenvalues()[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(s.eigenvalues()[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("seeded random 4x4") {
    const Spectrum s = spectral_decompose(random_hermitian(4, 99));
    CHECK(max_abs(s.eigenvectors().adjoint() * s.eigenvectors() - identity(4)) < 1e-10);
    CHECK(max_abs(s.reconstruct() - random_hermitian(4, 99).matrix()) < 1e-10);
  }
}

TEST_CASE("degenerate clusters follow the index-order rule") {
  // Fully degenerate: the basis is the standard basis itself.
  const Spectrum flat = spectral_decompose(HermitianOperator::diagonal({2.0, 2.0, 2.0}));
  CHECK(max_abs(flat.eigenvectors() - identity(3)) < 1e-15);

  // H = 1 + sigma_x (x) 1 on two qubits has two doubly degenerate levels.
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  h(0, 2) = h(2, 0) = h(1, 3) = h(3, 1) = 1.0;
  const Spectrum s = spectral_decompose(HermitianOperator(h));
  CHECK(s.eigenvalues()[0] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues()[1] == doctest::Approx(-1.0));
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = r;
  expected(2, 0) = -r;
  expected(1, 1) = r;
  expected(3, 1) = -r;
  expected(0, 2) = r;
  expected(2, 2) = r;
  expected(1, 3) = r;
  expected(3, 3) = r;
  CHECK(max_abs(s.eigenvectors() - expected) < 1e-12);

  // Same operator conjugated by a basis permutation inside the cluster must
  // still give a deterministic answer on repeated calls.
  const Spectrum again = spectral_decompose(HermitianOperator(h));
  CHECK(max_abs(again.eigenvectors() - s.eigenvectors()) == 0.0);
}

TEST_CASE("spectrum invariants on random matrices") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t d = 2 + seed % 7;
    const auto n = static_cast<Eigen::Index>(d);
    const HermitianOperator h = random_hermitian(d, seed);
    const Spectrum s = spectral_decompose(h);
    CHECK(std::is_sorted(s.eigenvalues().begin(), s.eigenvalues().end()));
    CHECK(max_abs(s.eigenvectors().adjoint() * s.eigenvectors() - identity(n)) < 1e-10);
    CHECK(max_abs(s.reconstruct() - h.matrix()) < 1e-10);
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < d; ++k) sum += projector(s, k);
    CHECK(max_abs(sum - identity(n)) < 1e-12);
  }
}

TEST_CASE("hermitian_expm") {
  CHECK(max_abs(hermitian_expm(HermitianOperator::zero(3), Complex(0.3, -2.0)) - identity(3)) == 0.0);

  const double beta = 0.7;
  const ComplexMatrix d = hermitian_expm(HermitianOperator::diagonal({1.0, 2.0}), -beta);
  CHECK(std::abs(d(0, 0) - std::exp(-beta)) < 1e-15);
  CHECK(std::abs(d(1, 1) - std::exp(-2 * beta)) < 1e-15);
  CHECK(std::abs(d(0, 1)) == 0.0);

  const ComplexMatrix u = hermitian_expm(HermitianOperator(sigma_x()), Complex(0.0, -std::numbers::pi));
  CHECK(max_abs(u + identity(2)) < 1e-12);
  CHECK(max_abs(u.adjoint() * u - identity(2)) < 1e-12);

  CHECK_THROWS_AS(hermitian_expm(HermitianOperator(sigma_x()), Complex(INFINITY, 0.0)), ArgumentError);
}

TEST_CASE("hermitian_expm properties") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const HermitianOperator h = random_hermitian(2 + seed % 7, seed + 1000);
    const double a = 0.1 + 0.05 * static_cast<double>(seed);
    const double b = 1.3 - 0.02 * static_cast<double>(seed);
    const ComplexMatrix lhs = hermitian_expm(h, Complex(0, -a)) * hermitian_expm(h, Complex(0, -b));
    CHECK(max_abs(lhs - hermitian_expm(h, Complex(0, -(a + b)))) < 1e-10);
    const ComplexMatrix real_exp = hermitian_expm(h, -a);
    CHECK(max_abs(real_exp - real_exp.adjoint()) < 1e-12);
  }
}

TEST_CASE("projectors") {
  const Spectrum s = spectral_decompose(HermitianOperator::diagonal({0.0, 1.0}));
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  CHECK(max_abs(projector(s, 0) - p0) == 0.0);

  const Spectrum sx = spectral_decompose(HermitianOperator(sigma_x()));
  CHECK(max_abs(projector(sx, 1) - ComplexMatrix::Constant(2, 2, 0.5)) < 1e-15);
  CHECK_THROWS_AS(projector(sx, 2), ArgumentError);
}

TEST_CASE("density operators") {
  CHECK(DensityOperator::maximally_mixed(4).matrix().trace().real() == doctest::Approx(1.0));
  CHECK_THROWS_AS(DensityOperator{identity(2)}, ConstructionError);
  ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityOperator{negative}, ConstructionError);
  ComplexMatrix rounding = ComplexMatrix::Zero(2, 2);
  rounding(0, 0) = 1.0 + 5e-13;
  rounding(1, 1) = -5e-13;
  CHECK_NOTHROW(DensityOperator{rounding});

  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const DensityOperator rho = random_density(2 + k % 5, rng);
    CHECK(std::abs(rho.matrix().trace() - 1.0) < 1e-12);
  }
}
