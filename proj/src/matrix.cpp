#include "nmfinit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nmfinit {

namespace {

void require_finite(const double* data, Index count, const char* context) {
    for (Index i = 0; i < count; ++i) {
        if (!std::isfinite(data[i]))
            throw InputError(std::string(context) + ": non-finite entry");
    }
}

}  // namespace

DataMatrix DataMatrix::from_dense(RowMat values) {
    require_finite(values.data(), values.size(), "DataMatrix");
    DataMatrix out;
    out.rows_ = values.rows();
    out.cols_ = values.cols();
    out.dense_ = std::move(values);
    return out;
}

DataMatrix DataMatrix::from_dense(const Mat& values) { return from_dense(RowMat(values)); }

DataMatrix DataMatrix::from_sparse(SpMat csr) {
    csr.makeCompressed();
    require_finite(csr.valuePtr(), csr.nonZeros(), "DataMatrix");
    // Eigen keeps inner indices sorted once compressed; verify the CSR
    // invariant anyway since downstream kernels rely on it.
    for (Index i = 0; i < csr.outerSize(); ++i) {
        Index prev = -1;
        for (SpMat::InnerIterator it(csr, i); it; ++it) {
            if (it.col() <= prev || it.col() >= csr.cols())
                throw InputError("DataMatrix: invalid CSR index structure");
            prev = it.col();
        }
    }
    DataMatrix out;
    out.rows_ = csr.rows();
    out.cols_ = csr.cols();
    out.sparse_storage_ = true;
    out.sparse_ = std::move(csr);
    return out;
}

Index DataMatrix::nnz() const { return sparse_storage_ ? sparse_.nonZeros() : rows_ * cols_; }

const RowMat& DataMatrix::dense() const {
    if (sparse_storage_) throw Error("DataMatrix: dense() on sparse storage");
    return dense_;
}

const SpMat& DataMatrix::sparse() const {
    if (!sparse_storage_) throw Error("DataMatrix: sparse() on dense storage");
    return sparse_;
}

Mat DataMatrix::materialize() const {
    if (sparse_storage_) return Mat(sparse_);
    return Mat(dense_);
}

bool DataMatrix::is_nonnegative() const {
    if (sparse_storage_) {
        const double* v = sparse_.valuePtr();
        return std::all_of(v, v + sparse_.nonZeros(), [](double x) { return x >= 0.0; });
    }
    return (dense_.array() >= 0.0).all();
}

void DataMatrix::require_nonnegative(const char* context) const {
    if (!is_nonnegative())
        throw NegativeEntry(std::string(context) + ": input matrix has negative entries");
}

void validate_factor_pair(const FactorPair& F, Index m, Index n, const char* context) {
    if (F.W.rows() != m || F.H.cols() != n || F.W.cols() != F.H.rows())
        throw DimensionMismatch(std::string(context) + ": factor dimensions do not conform");
    const Index r = F.W.cols();
    if (r < 1 || r > std::min(m, n))
        throw RankTooLarge(std::string(context) + ": rank outside [1, min(m,n)]");
    if (!F.W.allFinite() || !F.H.allFinite())
        throw InputError(std::string(context) + ": non-finite factor entry");
    if ((F.W.array() < 0.0).any() || (F.H.array() < 0.0).any())
        throw NegativeEntry(std::string(context) + ": factors must be nonnegative");
}

double frobenius_norm(const Mat& M) { return M.norm(); }

double frobenius_norm(const DataMatrix& M) {
    if (M.is_sparse()) {
        double acc = 0.0;
        const double* v = M.sparse().valuePtr();
        for (Index i = 0; i < M.sparse().nonZeros(); ++i) acc += v[i] * v[i];
        return std::sqrt(acc);
    }
    return M.dense().norm();
}

double residual_norm(const DataMatrix& X, const FactorPair& F) {
    if (F.W.rows() != X.rows() || F.H.cols() != X.cols() || F.W.cols() != F.H.rows())
        throw DimensionMismatch("residual_norm: dimensions do not conform");
    double acc = 0.0;
    if (X.is_sparse()) {
        const SpMat& S = X.sparse();
        Eigen::RowVectorXd row(X.cols());
        for (Index i = 0; i < X.rows(); ++i) {
            row.noalias() = -(F.W.row(i) * F.H);
            for (SpMat::InnerIterator it(S, i); it; ++it) row[it.col()] += it.value();
            acc += row.squaredNorm();
        }
    } else {
        constexpr Index block = 256;
        for (Index i0 = 0; i0 < X.rows(); i0 += block) {
            const Index bs = std::min(block, X.rows() - i0);
            Mat R = X.dense().middleRows(i0, bs) - F.W.middleRows(i0, bs) * F.H;
            acc += R.squaredNorm();
        }
    }
    return std::sqrt(acc);
}

double relative_error(const DataMatrix& X, const FactorPair& F) {
    const double denom = frobenius_norm(X);
    if (denom == 0.0) throw ZeroInputNorm("relative_error: ||X||_F is zero");
    return residual_norm(X, F) / denom;
}

double sparsity(const Mat& M) {
    if (M.size() == 0) throw EmptyMatrix("sparsity: empty matrix");
    const Index zeros = (M.array() == 0.0).count();
    return static_cast<double>(zeros) / static_cast<double>(M.size());
}

std::pair<Vec, Vec> split_parts(const Vec& v) {
    return {v.cwiseMax(0.0), (-v).cwiseMax(0.0)};
}

Mat gram(const Mat& M) {
    Mat G = Mat::Zero(M.cols(), M.cols());
    G.selfadjointView<Eigen::Lower>().rankUpdate(M.transpose());
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
    return G;
}

Mat matmul(const DataMatrix& X, const Mat& B) {
    if (X.cols() != B.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
    if (X.is_sparse()) return Mat(X.sparse() * B);
    return Mat(X.dense() * B);
}

Mat mat_t_mat(const Mat& W, const DataMatrix& X) {
    if (W.rows() != X.rows()) throw DimensionMismatch("mat_t_mat: inner dimensions differ");
    if (X.is_sparse()) return Mat(W.transpose() * X.sparse());
    return Mat(W.transpose() * X.dense());
}

Mat mat_mat_t(const DataMatrix& X, const Mat& H) {
    if (X.cols() != H.cols()) throw DimensionMismatch("mat_mat_t: inner dimensions differ");
    if (X.is_sparse()) return Mat(X.sparse() * H.transpose());
    return Mat(X.dense() * H.transpose());
}

}  // namespace nmfinit
