#pragma once

#include <cstdint>

#include "nmfinit/matrix.hpp"

namespace nmfinit {

/// Rank-p truncated SVD factors. Columns of U and V are orthonormal,
/// sigma is nonincreasing and nonnegative.
struct SvdFactors {
    Mat U;      // m x p
    Vec sigma;  // p
    Mat V;      // n x p
    Index rank() const { return sigma.size(); }
};

struct SvdOptions {
    /// Per-triplet residual target: ||X v_i - sigma_i u_i||_2 <= tol * sigma_1.
    /// tol <= 0 disables the residual-driven refinement; the sketch then runs
    /// exactly power_iters subspace passes (best effort, never throws
    /// ConvergenceFailure).
    double tol = 1e-8;
    int power_iters = 2;
    int oversample = 10;
    /// Cap on total subspace-iteration passes (initial + refinement).
    int max_power_iters = 300;
    std::uint64_t seed = 0;
};

/// Randomized range-finder truncated SVD of a dense or sparse matrix.
/// The Gaussian sketch is controlled by opts.seed; output is deterministic
/// given (X, p, opts). Sign convention: each (u_i, v_i) pair is flipped so
/// the largest-magnitude entry of u_i is positive.
///
/// Throws RankTooLarge if p is outside [1, min(m,n)], ConvergenceFailure if
/// opts.tol > 0 and the residual target is not met within max_power_iters.
SvdFactors truncated_svd(const DataMatrix& X, Index p, const SvdOptions& opts = {});

/// Two-factor form: Y = U*diag(sqrt(sigma)), Z = diag(sqrt(sigma))*V^T,
/// so that Y*Z == U*diag(sigma)*V^T.
LowRankMatrix to_two_factor(const SvdFactors& S);

}  // namespace nmfinit
