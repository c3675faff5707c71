#include "nmfinit/tsvd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "nmfinit/rng.hpp"

namespace nmfinit {

namespace {

Mat orthonormal_basis(const Mat& A) {
    Eigen::HouseholderQR<Mat> qr(A);
    return qr.householderQ() * Mat::Identity(A.rows(), A.cols());
}

// One subspace pass: Q <- orth(X * orth(X^T * Q)).
void power_pass(const DataMatrix& X, Mat& Q) {
    Mat Z = orthonormal_basis(mat_t_mat(Q, X).transpose());  // n x l
    Q = orthonormal_basis(matmul(X, Z));                     // m x l
}

struct ProjectedSvd {
    Mat U;
    Vec sigma;
    Mat V;
};

// SVD of the projected matrix B = Q^T X, lifted back through Q.
ProjectedSvd project_and_factor(const DataMatrix& X, const Mat& Q, Index p) {
    Mat B = mat_t_mat(Q, X);  // l x n
    Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ProjectedSvd out;
    out.U = Q * svd.matrixU().leftCols(p);
    out.sigma = svd.singularValues().head(p);
    out.V = svd.matrixV().leftCols(p);
    return out;
}

// max_i ||X v_i - sigma_i u_i||_2, as a multiple of sigma_1.
double worst_residual(const DataMatrix& X, const ProjectedSvd& f) {
    Mat R = matmul(X, f.V) - f.U * f.sigma.asDiagonal();
    double worst = 0.0;
    for (Index i = 0; i < f.sigma.size(); ++i) worst = std::max(worst, R.col(i).norm());
    const double scale = f.sigma.size() > 0 ? f.sigma[0] : 0.0;
    if (scale == 0.0) return worst;  // zero matrix: residuals are absolute
    return worst / scale;
}

void apply_sign_convention(Mat& U, Mat& V) {
    for (Index i = 0; i < U.cols(); ++i) {
        Index idx = 0;
        U.col(i).cwiseAbs().maxCoeff(&idx);
        if (U(idx, i) < 0.0) {
            U.col(i) = -U.col(i);
            V.col(i) = -V.col(i);
        }
    }
}

}  // namespace

SvdFactors truncated_svd(const DataMatrix& X, Index p, const SvdOptions& opts) {
    const Index m = X.rows();
    const Index n = X.cols();
    if (m == 0 || n == 0) throw EmptyMatrix("truncated_svd: empty matrix");
    if (p < 1 || p > std::min(m, n))
        throw RankTooLarge("truncated_svd: rank outside [1, min(m,n)]");

    const Index sketch = std::min(std::min(m, n), p + static_cast<Index>(opts.oversample));

    Rng rng(opts.seed);
    Mat G(n, sketch);
    for (Index j = 0; j < sketch; ++j)
        for (Index i = 0; i < n; ++i) G(i, j) = rng.gaussian();

    Mat Q = orthonormal_basis(matmul(X, G));
    int passes = 0;
    for (int q = 0; q < opts.power_iters && passes < opts.max_power_iters; ++q) {
        power_pass(X, Q);
        ++passes;
    }

    ProjectedSvd f = project_and_factor(X, Q, p);
    if (opts.tol > 0.0) {
        while (worst_residual(X, f) > opts.tol) {
            if (passes >= opts.max_power_iters)
                throw ConvergenceFailure("truncated_svd: residual tolerance not reached "
                                         "within the power-iteration cap");
            power_pass(X, Q);
            ++passes;
            f = project_and_factor(X, Q, p);
        }
    }

    apply_sign_convention(f.U, f.V);
    return SvdFactors{std::move(f.U), std::move(f.sigma), std::move(f.V)};
}

LowRankMatrix to_two_factor(const SvdFactors& S) {
    const Vec root = S.sigma.cwiseMax(0.0).cwiseSqrt();
    LowRankMatrix out;
    out.Y = S.U * root.asDiagonal();
    out.Z = root.asDiagonal() * S.V.transpose();
    return out;
}

}  // namespace nmfinit
