// SPDX-License-Identifier: Apache-2.0

// Random symmetric test operands for the verification harnesses.

#pragma once

#include <cstdint>
#include <random>

#include "opconn/symcore.hpp"

namespace opconn {

using Rng = std::mt19937_64;

/// Independent per-trial seed derived from a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Haar-ish orthogonal matrix from the QR factorization of a Gaussian matrix.
MatrixXd random_orthogonal(Rng &rng, int n);

/// Q diag(lambda) Q^T with log-uniform eigenvalues in [lo, hi].
MatrixXd random_pd(Rng &rng, int n, double lo = 0.1, double hi = 10.0);

/// PSD matrix of the given rank with log-uniform nonzero eigenvalues in [lo, hi].
MatrixXd random_psd(Rng &rng, int n, int rank, double lo = 0.1, double hi = 10.0);

/// Symmetric invertible matrix with eigenvalue magnitudes in [lo, hi] and random signs.
MatrixXd random_symmetric(Rng &rng, int n, double lo = 0.5, double hi = 2.0);

/// Orthogonal projection onto a random subspace of the given rank.
MatrixXd random_projection(Rng &rng, int n, int rank);

} // namespace opconn
