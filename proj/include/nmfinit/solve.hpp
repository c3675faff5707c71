#pragma once

#include <memory>
#include <vector>

#include "nmfinit/matrix.hpp"

namespace nmfinit {

/// Sequence of approximation errors recorded by a correction or solve loop:
/// e_0 (initial), e_1, ..., e_k. Nonincreasing up to roundoff.
struct ErrorTrace {
    std::vector<double> errors;
    int iterations() const { return errors.empty() ? 0 : static_cast<int>(errors.size()) - 1; }
};

struct SolveOptions {
    int max_iters = 100;
    /// Wall-clock budget in seconds; 0 disables the limit.
    double time_limit = 0.0;
    /// Added to MU denominators.
    double epsilon_guard = 1e-16;
    /// A-HALS inner-sweep growth parameter (cap = 1 + alpha * cost ratio).
    double accel_alpha = 0.5;
    /// A-HALS inner-loop stagnation threshold relative to the first sweep.
    double accel_eps = 0.1;
    bool record_trace = true;
};

struct SolveResult {
    FactorPair factors;
    /// Relative errors against the solve target, one entry per outer
    /// iteration plus the initial point.
    ErrorTrace trace;
    int iters_run = 0;
    double wall_time = 0.0;
};

/// Multiplicative updates for min ||X - WH||_F^2, H then W per iteration.
SolveResult mu_solve(const DataMatrix& X, FactorPair init, const SolveOptions& opts = {});

/// Accelerated HALS on an explicit target.
SolveResult ahals_solve(const DataMatrix& X, FactorPair init, const SolveOptions& opts = {});

/// Accelerated HALS on an implicit product Y*Z. All data-dependent products
/// route through Y and Z; the m x n target is never formed.
SolveResult ahals_solve(const LowRankMatrix& L, FactorPair init, const SolveOptions& opts = {});

/// Nonnegative least squares update of H for fixed W: approximately solves
/// min_{H >= 0} ||X - WH||_F via HALS sweeps on H, iterated until the
/// projected-gradient stationarity residual max|min(H, grad)| drops below
/// 1e-6 * ||W^T X||_max. Throws ZeroColumn if W has an all-zero column.
Mat nnls_update_h(const DataMatrix& X, const Mat& W, const Mat& H0);

/// ||Y*Z - W*H||_F via the Gram inner-product identity
///   <Y^T Y, Z Z^T> - 2 <(W^T Y) Z, H> + <W^T W, H H^T>,
/// clamped at zero before the square root. O((m+n)(p+r)^2), no m x n product.
double low_rank_error(const LowRankMatrix& L, const FactorPair& F);

namespace detail {
// Drives the NNSVD-LRC correction loop: one accelerated HALS outer iteration
// (W block, then H block) per call against a fixed implicit target, with the
// target's Gram constant <Y^T Y, Z Z^T> computed once. The referenced
// LowRankMatrix must outlive this object.
class LowRankCorrection {
  public:
    explicit LowRankCorrection(const LowRankMatrix& L);
    ~LowRankCorrection();
    void iterate(FactorPair& F, const SolveOptions& opts);
    double error(const FactorPair& F) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};
}  // namespace detail

}  // namespace nmfinit
