#pragma once

// Seeded random operators for scenario generation and property checks.

#include <cstddef>
#include <cstdint>
#include <random>

#include "tdfr/channels.hpp"
#include "tdfr/operators.hpp"

namespace tdfr {

using Rng = std::mt19937_64;

/// Hermitian matrix with complex Gaussian entries scaled by 1/sqrt(2 dim),
/// so its spectrum stays O(1) for every dimension.
HermitianOperator random_hermitian(std::size_t dim, Rng& rng);
HermitianOperator random_hermitian(std::size_t dim, std::uint64_t seed);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix random_unitary(std::size_t dim, Rng& rng);

/// Generic (non-unital) channel from a random isometry C^d -> C^{k d}.
QuantumChannel random_channel(std::size_t dim, std::size_t kraus_count, Rng& rng);

/// Unital channel: convex mixture of `count` random unitaries.
QuantumChannel random_unital_channel(std::size_t dim, std::size_t count, Rng& rng);

/// Full-rank random state rho = A A^dag / Tr(A A^dag).
DensityOperator random_density(std::size_t dim, Rng& rng);

}  // namespace tdfr
