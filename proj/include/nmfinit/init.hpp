#pragma once

#include <cstdint>

#include "nmfinit/matrix.hpp"
#include "nmfinit/solve.hpp"
#include "nmfinit/tsvd.hpp"

namespace nmfinit {

struct InitConfig {
    Index rank = 1;
    /// Correction stopping proportion: another A-HALS iteration runs only
    /// while the previous one improved the error by at least delta * e_0.
    double delta = 0.05;
    int max_correction_iters = 100;
    /// Residual tolerance forwarded to truncated_svd; <= 0 keeps the fixed
    /// q-pass sketch (the default for initialization work).
    double svd_tol = 0.0;
    int svd_power_iters = 2;
    std::uint64_t seed = 0;
};

struct InitResult {
    FactorPair factors;
    /// Truncated-SVD rank consumed: ceil(r/2 + 1) for NNSVD-LRC, r for the
    /// SVD baselines, 0 for the random baseline.
    Index svd_rank_used = 0;
    /// Absolute errors ||X_p - WH||_F per correction iteration (e_0 first).
    /// Empty for the baselines, which run no correction.
    ErrorTrace correction_trace;
    double wall_time = 0.0;
};

/// Truncated-SVD rank used by nnsvd_lrc: ceil(r/2 + 1).
Index nnsvd_lrc_svd_rank(Index r);

/// Populate r columns/rows from the two-factor form (Y_p, Z_p):
/// column 1 = (|y_1|, |z_1|), then for each triplet j >= 2 the positive-part
/// pair followed by the negative-part pair, until r columns are filled (for
/// even r the last triplet contributes only its positive part). Column pairs
/// taken from one triplet have exactly complementary supports.
FactorPair interleave_parts(const LowRankMatrix& L, Index r);

/// NNDSVD selection from the two-factor form: per triplet, the part pair
/// with the larger rank-one norm ||y part|| * ||z part|| (ties go to the
/// positive part); triplet 1 is taken as (|y_1|, |z_1|).
FactorPair nndsvd_select(const LowRankMatrix& L, Index r);

/// Nonnegative SVD initialization with low-rank correction: rank-ceil(r/2+1)
/// truncated SVD, interleaved population, then A-HALS iterations against the
/// implicit X_p = Y_p * Z_p until an iteration improves ||X_p - WH||_F by
/// less than delta * e_0 (or the iteration cap).
InitResult nnsvd_lrc(const DataMatrix& X, const InitConfig& cfg);

/// Nonnegative double SVD: rank-r truncated SVD, per-triplet part selection,
/// no correction.
InitResult nndsvd(const DataMatrix& X, const InitConfig& cfg);

/// Absolute-value initialization: W = |Y_r|, H = |Z_r| from a rank-r
/// truncated SVD.
InitResult svd_nmf(const DataMatrix& X, const InitConfig& cfg);

/// Uniform(0,1) factors, unscaled. Deterministic given seed.
InitResult random_init(Index m, Index n, Index r, std::uint64_t seed);

/// Uniform(0,1) factors scaled so that ||W H||_F = ||X||_F.
InitResult random_init(const DataMatrix& X, const InitConfig& cfg);

}  // namespace nmfinit
