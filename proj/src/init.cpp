#include "nmfinit/init.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "nmfinit/rng.hpp"

namespace nmfinit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_config(const InitConfig& cfg) {
    if (cfg.rank < 1) throw RankTooLarge("initializer: rank must be >= 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw InputError("initializer: delta must lie in (0, 1)");
    if (cfg.max_correction_iters < 1)
        throw InputError("initializer: max_correction_iters must be >= 1");
}

SvdOptions svd_options(const InitConfig& cfg) {
    SvdOptions opts;
    opts.tol = cfg.svd_tol;
    opts.power_iters = cfg.svd_power_iters;
    opts.seed = cfg.seed;
    return opts;
}

// Exactly-zero columns (rank-deficient X: sigma_i = 0) are re-seeded with a
// small uniform positive vector so the correction/solve loops can move them.
void reseed_zero_columns(FactorPair& F, double input_norm, std::uint64_t seed) {
    if (input_norm == 0.0) return;
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const double scale = 1e-8 * input_norm / std::sqrt(static_cast<double>(F.W.rows()));
    for (Index l = 0; l < F.W.cols(); ++l) {
        if ((F.W.col(l).array() != 0.0).any()) continue;
        for (Index i = 0; i < F.W.rows(); ++i) F.W(i, l) = scale * rng.uniform_pos();
    }
}

}  // namespace

Index nnsvd_lrc_svd_rank(Index r) { return (r + 1) / 2 + 1; }

FactorPair interleave_parts(const LowRankMatrix& L, Index r) {
    const Index m = L.rows();
    const Index n = L.cols();
    const Index p = L.rank();
    if (r < 1) throw RankTooLarge("interleave_parts: rank must be >= 1");

    FactorPair F{Mat::Zero(m, r), Mat::Zero(r, n)};
    F.W.col(0) = L.Y.col(0).cwiseAbs();
    F.H.row(0) = L.Z.row(0).cwiseAbs();

    Index col = 1;
    for (Index j = 1; j < p && col < r; ++j) {
        F.W.col(col) = L.Y.col(j).cwiseMax(0.0);
        F.H.row(col) = L.Z.row(j).cwiseMax(0.0);
        if (++col >= r) break;
        F.W.col(col) = (-L.Y.col(j)).cwiseMax(0.0);
        F.H.row(col) = (-L.Z.row(j)).cwiseMax(0.0);
        ++col;
    }
    return F;
}

FactorPair nndsvd_select(const LowRankMatrix& L, Index r) {
    const Index m = L.rows();
    const Index n = L.cols();
    if (r < 1 || r > L.rank()) throw RankTooLarge("nndsvd_select: rank exceeds factors");

    FactorPair F{Mat::Zero(m, r), Mat::Zero(r, n)};
    F.W.col(0) = L.Y.col(0).cwiseAbs();
    F.H.row(0) = L.Z.row(0).cwiseAbs();

    for (Index i = 1; i < r; ++i) {
        auto [y_pos, y_neg] = split_parts(L.Y.col(i));
        auto [z_pos, z_neg] = split_parts(L.Z.row(i).transpose());
        // ||a b^T||_F = ||a||_2 ||b||_2
        const double norm_pos = y_pos.norm() * z_pos.norm();
        const double norm_neg = y_neg.norm() * z_neg.norm();
        if (norm_pos >= norm_neg) {
            F.W.col(i) = y_pos;
            F.H.row(i) = z_pos.transpose();
        } else {
            F.W.col(i) = y_neg;
            F.H.row(i) = z_neg.transpose();
        }
    }
    return F;
}

InitResult nnsvd_lrc(const DataMatrix& X, const InitConfig& cfg) {
    const auto start = Clock::now();
    validate_config(cfg);
    X.require_nonnegative("nnsvd_lrc");
    const Index r = cfg.rank;
    if (r > std::min(X.rows(), X.cols()) - 1)
        throw RankTooLarge("nnsvd_lrc: rank must be <= min(m,n) - 1");

    const Index p = nnsvd_lrc_svd_rank(r);
    const SvdFactors S = truncated_svd(X, p, svd_options(cfg));
    const LowRankMatrix L = to_two_factor(S);

    FactorPair F = interleave_parts(L, r);
    reseed_zero_columns(F, frobenius_norm(X), cfg.seed);

    SolveOptions correction;  // A-HALS defaults
    detail::LowRankCorrection loop(L);
    ErrorTrace trace;
    const double e0 = loop.error(F);
    trace.errors.push_back(e0);

    double e_prev = e0;
    for (int k = 0; k < cfg.max_correction_iters; ++k) {
        loop.iterate(F, correction);
        const double e = loop.error(F);
        trace.errors.push_back(e);
        const double improvement = e_prev - e;
        e_prev = e;
        if (!(improvement > 0.0 && improvement >= cfg.delta * e0)) break;
    }

    return InitResult{std::move(F), p, std::move(trace), seconds_since(start)};
}

InitResult nndsvd(const DataMatrix& X, const InitConfig& cfg) {
    const auto start = Clock::now();
    validate_config(cfg);
    X.require_nonnegative("nndsvd");
    if (cfg.rank > std::min(X.rows(), X.cols()))
        throw RankTooLarge("nndsvd: rank must be <= min(m,n)");

    const SvdFactors S = truncated_svd(X, cfg.rank, svd_options(cfg));
    FactorPair F = nndsvd_select(to_two_factor(S), cfg.rank);
    reseed_zero_columns(F, frobenius_norm(X), cfg.seed);
    return InitResult{std::move(F), cfg.rank, {}, seconds_since(start)};
}

InitResult svd_nmf(const DataMatrix& X, const InitConfig& cfg) {
    const auto start = Clock::now();
    validate_config(cfg);
    X.require_nonnegative("svd_nmf");
    if (cfg.rank > std::min(X.rows(), X.cols()))
        throw RankTooLarge("svd_nmf: rank must be <= min(m,n)");

    const SvdFactors S = truncated_svd(X, cfg.rank, svd_options(cfg));
    const LowRankMatrix L = to_two_factor(S);
    FactorPair F{L.Y.cwiseAbs(), L.Z.cwiseAbs()};
    reseed_zero_columns(F, frobenius_norm(X), cfg.seed);
    return InitResult{std::move(F), cfg.rank, {}, seconds_since(start)};
}

InitResult random_init(Index m, Index n, Index r, std::uint64_t seed) {
    if (r < 1 || r > std::min(m, n)) throw RankTooLarge("random_init: rank outside [1, min(m,n)]");
    const auto start = Clock::now();
    Rng rng(seed);
    FactorPair F{Mat(m, r), Mat(r, n)};
    for (Index j = 0; j < r; ++j)
        for (Index i = 0; i < m; ++i) F.W(i, j) = rng.uniform();
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < r; ++i) F.H(i, j) = rng.uniform();
    return InitResult{std::move(F), 0, {}, seconds_since(start)};
}

InitResult random_init(const DataMatrix& X, const InitConfig& cfg) {
    const auto start = Clock::now();
    validate_config(cfg);
    InitResult out = random_init(X.rows(), X.cols(), cfg.rank, cfg.seed);
    // ||WH||_F via <W^T W, H H^T>, then scale both factors by sqrt(s).
    const double wh_norm = std::sqrt(std::max(
        0.0, (gram(out.factors.W).array() * (out.factors.H * out.factors.H.transpose()).array())
                 .sum()));
    if (wh_norm > 0.0) {
        const double s = std::sqrt(frobenius_norm(X) / wh_norm);
        out.factors.W *= s;
        out.factors.H *= s;
    }
    out.wall_time = seconds_since(start);
    return out;
}

}  // namespace nmfinit
