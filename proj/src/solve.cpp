#include "nmfinit/solve.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>

namespace nmfinit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Column/row that collapsed to exactly zero during a sweep is reset to a
// constant positive vector at a scale far below the data: HALS and MU cannot
// escape an exactly zero block on their own.
constexpr double kRescueScale = 1e-8;

// Explicit m x n target.
struct ExplicitTarget {
    const DataMatrix& X;
    double norm;

    explicit ExplicitTarget(const DataMatrix& x) : X(x), norm(frobenius_norm(x)) {}

    Index rows() const { return X.rows(); }
    Index cols() const { return X.cols(); }
    Mat a_for_w(const Mat& H) const { return mat_mat_t(X, H); }   // X H^T
    Mat a_for_h(const Mat& W) const { return mat_t_mat(W, X); }   // W^T X
    double error(const FactorPair& F) const { return residual_norm(X, F); }

    // A-HALS inner-sweep budgets: flop ratio of the (A, B) computation to one
    // column sweep, per the reference schedule.
    double rho_w(Index r) const {
        const double m = static_cast<double>(rows()), n = static_cast<double>(cols());
        return (m * n + n * static_cast<double>(r)) / (m * static_cast<double>(r) + m);
    }
    double rho_h(Index r) const {
        const double m = static_cast<double>(rows()), n = static_cast<double>(cols());
        return (m * n + m * static_cast<double>(r)) / (n * static_cast<double>(r) + n);
    }
};

// Implicit target Y*Z. Products are associated through the p-dimensional
// inner factor so no m x n operand appears; the sweep budgets use the
// implicit (A, B) cost, which is what keeps one outer iteration at
// O((m+n)r^2) instead of O(mnr).
struct ImplicitTarget {
    const LowRankMatrix& L;
    double norm;

    explicit ImplicitTarget(const LowRankMatrix& l)
        : L(l), norm(std::sqrt(std::max(
              0.0, (gram(l.Y).array() * (l.Z * l.Z.transpose()).array()).sum()))) {}

    Index rows() const { return L.rows(); }
    Index cols() const { return L.cols(); }

    Mat a_for_w(const Mat& H) const {
#ifndef NDEBUG
        assert_flop_budget(H.rows());
#endif
        return L.Y * (L.Z * H.transpose());
    }
    Mat a_for_h(const Mat& W) const {
#ifndef NDEBUG
        assert_flop_budget(W.cols());
#endif
        return (W.transpose() * L.Y) * L.Z;
    }
    double error(const FactorPair& F) const { return low_rank_error(L, F); }

    // Same normalization as the explicit formulas (costs divided by r):
    // A = Y*(Z*H^T) costs (m+n)*p*r and B costs n*r^2, against a sweep's
    // m*r*(r+1).
    double rho_w(Index r) const {
        const double m = static_cast<double>(rows()), n = static_cast<double>(cols());
        const double p = static_cast<double>(L.rank()), rr = static_cast<double>(r);
        return (n * p + m * p + n * rr) / (m * rr + m);
    }
    double rho_h(Index r) const {
        const double m = static_cast<double>(rows()), n = static_cast<double>(cols());
        const double p = static_cast<double>(L.rank()), rr = static_cast<double>(r);
        return (m * p + n * p + m * rr) / (n * rr + n);
    }

#ifndef NDEBUG
    // Data-dependent products per iteration must scale as (m+n)*r*p,
    // never as m*n*r.
    void assert_flop_budget(Index r) const {
        const double m = static_cast<double>(L.rows());
        const double n = static_cast<double>(L.cols());
        const double p = static_cast<double>(L.rank());
        const double rr = static_cast<double>(r);
        const double flops = 2.0 * (n * p * rr + m * p * rr);
        const double cap = std::max(rr, p);
        assert(flops <= 8.0 * (m + n) * cap * cap);
    }
#endif
};

void check_conforms(Index m, Index n, const FactorPair& F, const char* context) {
    validate_factor_pair(F, m, n, context);
}

void rescue_if_zero_column(Mat& W, Index l, double scale) {
    if ((W.col(l).array() != 0.0).any()) return;
    if (scale == 0.0) return;
    W.col(l).setConstant(kRescueScale * scale / std::sqrt(static_cast<double>(W.rows())));
}

void rescue_if_zero_row(Mat& H, Index l, double scale) {
    if ((H.row(l).array() != 0.0).any()) return;
    if (scale == 0.0) return;
    H.row(l).setConstant(kRescueScale * scale / std::sqrt(static_cast<double>(H.cols())));
}

// One HALS sweep over the columns of W given A = target*H^T, B = H*H^T.
// Returns ||delta W||_F. Columns are sequentially dependent through W*B(:,l).
double hals_sweep_w(Mat& W, const Mat& A, const Mat& B, double rescue_scale) {
    double change_sq = 0.0;
    for (Index l = 0; l < W.cols(); ++l) {
        const double b_ll = B(l, l);
        if (b_ll <= 0.0) continue;  // degenerate block: H row is zero, objective flat in W(:,l)
        Vec updated = (W.col(l) + (A.col(l) - W * B.col(l)) / b_ll).cwiseMax(0.0);
        change_sq += (updated - W.col(l)).squaredNorm();
        W.col(l) = updated;
        rescue_if_zero_column(W, l, rescue_scale);
    }
    return std::sqrt(change_sq);
}

// Symmetric sweep over the rows of H given A = W^T*target, B = W^T*W.
double hals_sweep_h(Mat& H, const Mat& A, const Mat& B, double rescue_scale) {
    double change_sq = 0.0;
    for (Index l = 0; l < H.rows(); ++l) {
        const double b_ll = B(l, l);
        if (b_ll <= 0.0) continue;
        Eigen::RowVectorXd updated =
            (H.row(l) + (A.row(l) - B.row(l) * H) / b_ll).cwiseMax(0.0);
        change_sq += (updated - H.row(l)).squaredNorm();
        H.row(l) = updated;
        rescue_if_zero_row(H, l, rescue_scale);
    }
    return std::sqrt(change_sq);
}

int inner_cap(double rho, double alpha) {
    return 1 + static_cast<int>(std::floor(alpha * rho));
}

template <typename Sweep>
void accelerated_block(Sweep sweep, int cap, double accel_eps) {
    double first = 0.0;
    for (int count = 1;; ++count) {
        const double change = sweep();
        if (count == 1) first = change;
        if (change == 0.0) break;
        if (count >= cap) break;
        if (change < accel_eps * first) break;
    }
}

}  // namespace

double low_rank_error(const LowRankMatrix& L, const FactorPair& F) {
    if (F.W.rows() != L.rows() || F.H.cols() != L.cols() || F.W.cols() != F.H.rows())
        throw DimensionMismatch("low_rank_error: dimensions do not conform");
    const Mat YtY = gram(L.Y);
    const Mat ZZt = L.Z * L.Z.transpose();
    const Mat WtW = gram(F.W);
    const Mat HHt = F.H * F.H.transpose();
    const double t1 = (YtY.array() * ZZt.array()).sum();
    const double t2 = (((F.W.transpose() * L.Y) * L.Z).array() * F.H.array()).sum();
    const double t3 = (WtW.array() * HHt.array()).sum();
    return std::sqrt(std::max(0.0, t1 - 2.0 * t2 + t3));
}

namespace detail {

// One accelerated HALS outer iteration (W block then H block) shared by the
// solver entry points and the initializer correction loop.
template <class Target>
void ahals_iteration(const Target& t, FactorPair& F, const SolveOptions& opts) {
    const Index r = F.rank();
    {
        const Mat A = t.a_for_w(F.H);
        const Mat B = F.H * F.H.transpose();
        const int cap = inner_cap(t.rho_w(r), opts.accel_alpha);
        accelerated_block([&] { return hals_sweep_w(F.W, A, B, t.norm); }, cap,
                          opts.accel_eps);
    }
    {
        const Mat A = t.a_for_h(F.W);
        const Mat B = gram(F.W);
        const int cap = inner_cap(t.rho_h(r), opts.accel_alpha);
        accelerated_block([&] { return hals_sweep_h(F.H, A, B, t.norm); }, cap,
                          opts.accel_eps);
    }
}

template <class Target>
SolveResult ahals_solve_impl(const Target& t, FactorPair F, const SolveOptions& opts) {
    check_conforms(t.rows(), t.cols(), F, "ahals_solve");
    if (opts.max_iters < 1) throw InputError("ahals_solve: max_iters must be >= 1");

    const auto start = Clock::now();
    SolveResult out;
    const double denom = t.norm > 0.0 ? t.norm : 1.0;
    if (opts.record_trace) out.trace.errors.push_back(t.error(F) / denom);

    for (int it = 0; it < opts.max_iters; ++it) {
        ahals_iteration(t, F, opts);
        ++out.iters_run;
        if (opts.record_trace) out.trace.errors.push_back(t.error(F) / denom);
        if (opts.time_limit > 0.0 && seconds_since(start) >= opts.time_limit) break;
    }

    out.factors = std::move(F);
    out.wall_time = seconds_since(start);
    return out;
}

}  // namespace detail

SolveResult ahals_solve(const DataMatrix& X, FactorPair init, const SolveOptions& opts) {
    return detail::ahals_solve_impl(ExplicitTarget(X), std::move(init), opts);
}

SolveResult ahals_solve(const LowRankMatrix& L, FactorPair init, const SolveOptions& opts) {
    if (L.Y.cols() != L.Z.rows())
        throw DimensionMismatch("ahals_solve: Y and Z do not conform");
    return detail::ahals_solve_impl(ImplicitTarget(L), std::move(init), opts);
}

SolveResult mu_solve(const DataMatrix& X, FactorPair init, const SolveOptions& opts) {
    check_conforms(X.rows(), X.cols(), init, "mu_solve");
    X.require_nonnegative("mu_solve");
    if (opts.max_iters < 1) throw InputError("mu_solve: max_iters must be >= 1");

    const auto start = Clock::now();
    const double norm = frobenius_norm(X);
    const double denom = norm > 0.0 ? norm : 1.0;
    const double eps = opts.epsilon_guard;

    FactorPair F = std::move(init);
    SolveResult out;
    if (opts.record_trace) out.trace.errors.push_back(residual_norm(X, F) / denom);

    for (int it = 0; it < opts.max_iters; ++it) {
        // H <- H .* (W^T X) ./ (W^T W H + eps)
        {
            const Mat numer = mat_t_mat(F.W, X);
            const Mat denom_h = gram(F.W) * F.H;
            F.H = (F.H.array() * numer.array() / (denom_h.array() + eps)).matrix();
        }
        // W <- W .* (X H^T) ./ (W H H^T + eps)
        {
            const Mat numer = mat_mat_t(X, F.H);
            const Mat denom_w = F.W * (F.H * F.H.transpose());
            F.W = (F.W.array() * numer.array() / (denom_w.array() + eps)).matrix();
        }
        ++out.iters_run;
        if (opts.record_trace) out.trace.errors.push_back(residual_norm(X, F) / denom);
        if (opts.time_limit > 0.0 && seconds_since(start) >= opts.time_limit) break;
    }

    out.factors = std::move(F);
    out.wall_time = seconds_since(start);
    return out;
}

Mat nnls_update_h(const DataMatrix& X, const Mat& W, const Mat& H0) {
    if (W.rows() != X.rows() || H0.cols() != X.cols() || W.cols() != H0.rows())
        throw DimensionMismatch("nnls_update_h: dimensions do not conform");
    if ((W.array() < 0.0).any()) throw NegativeEntry("nnls_update_h: W must be nonnegative");
    if ((H0.array() < 0.0).any()) throw NegativeEntry("nnls_update_h: H0 must be nonnegative");
    for (Index l = 0; l < W.cols(); ++l)
        if ((W.col(l).array() == 0.0).all())
            throw ZeroColumn("nnls_update_h: W has an all-zero column");

    const Mat G = gram(W);          // r x r
    const Mat C = mat_t_mat(W, X);  // r x n
    const double kkt_tol = 1e-6 * C.cwiseAbs().maxCoeff();

    Mat H = H0;
    constexpr int kMaxSweeps = 5000;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        hals_sweep_h(H, C, G, /*rescue_scale=*/0.0);
        const Mat grad = G * H - C;
        const double kkt = H.cwiseMin(grad).cwiseAbs().maxCoeff();
        if (kkt <= kkt_tol) return H;
    }
    throw ConvergenceFailure("nnls_update_h: stationarity tolerance not reached");
}

namespace detail {

struct LowRankCorrection::Impl {
    ImplicitTarget target;
    double gram_constant;  // <Y^T Y, Z Z^T>

    explicit Impl(const LowRankMatrix& L)
        : target(L),
          gram_constant(
              (gram(L.Y).array() * (L.Z * L.Z.transpose()).array()).sum()) {}
};

LowRankCorrection::LowRankCorrection(const LowRankMatrix& L) : impl_(new Impl(L)) {}
LowRankCorrection::~LowRankCorrection() = default;

void LowRankCorrection::iterate(FactorPair& F, const SolveOptions& opts) {
    ahals_iteration(impl_->target, F, opts);
}

double LowRankCorrection::error(const FactorPair& F) const {
    const LowRankMatrix& L = impl_->target.L;
    const double t2 = (((F.W.transpose() * L.Y) * L.Z).array() * F.H.array()).sum();
    const double t3 = (gram(F.W).array() * (F.H * F.H.transpose()).array()).sum();
    return std::sqrt(std::max(0.0, impl_->gram_constant - 2.0 * t2 + t3));
}

}  // namespace detail

}  // namespace nmfinit
