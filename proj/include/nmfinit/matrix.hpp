#pragma once

#include <utility>

#include "nmfinit/errors.hpp"
#include "nmfinit/types.hpp"

namespace nmfinit {

/// Factorization target X with dense (row-major) or CSR storage.
/// Entries are validated finite on construction. Nonnegativity is a property
/// of NMF *inputs*, checked by require_nonnegative() at ingestion points;
/// the kernels below do not assume it.
class DataMatrix {
  public:
    static DataMatrix from_dense(RowMat values);
    static DataMatrix from_dense(const Mat& values);
    static DataMatrix from_sparse(SpMat csr);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    bool is_sparse() const { return sparse_storage_; }
    /// Stored nonzeros for sparse storage; m*n for dense.
    Index nnz() const;

    const RowMat& dense() const;
    const SpMat& sparse() const;

    /// Dense copy regardless of storage. Intended for small matrices.
    Mat materialize() const;

    bool is_nonnegative() const;
    void require_nonnegative(const char* context) const;

  private:
    DataMatrix() = default;
    Index rows_ = 0;
    Index cols_ = 0;
    bool sparse_storage_ = false;
    RowMat dense_;
    SpMat sparse_;
};

/// NMF candidate (W, H). Both factors are dense and entrywise nonnegative.
struct FactorPair {
    Mat W;  // m x r
    Mat H;  // r x n
    Index rank() const { return W.cols(); }
};

/// Matrix held implicitly as the product Y*Z; never materialized by the
/// solver paths. Entries of Y and Z may be negative.
struct LowRankMatrix {
    Mat Y;  // m x p
    Mat Z;  // p x n
    Index rank() const { return Y.cols(); }
    Index rows() const { return Y.rows(); }
    Index cols() const { return Z.cols(); }
    Mat materialize() const { return Y * Z; }
};

/// Throws unless F conforms to an m x n target and is finite and nonnegative.
void validate_factor_pair(const FactorPair& F, Index m, Index n, const char* context);

double frobenius_norm(const Mat& M);
double frobenius_norm(const DataMatrix& M);

/// ||X - W*H||_F, streamed so the m x n residual is never fully materialized.
double residual_norm(const DataMatrix& X, const FactorPair& F);

/// ||X - W*H||_F / ||X||_F. Throws ZeroInputNorm when ||X||_F == 0.
double relative_error(const DataMatrix& X, const FactorPair& F);

/// Fraction of entries exactly equal to zero (-0.0 counts as zero).
double sparsity(const Mat& M);

/// v -> (max(0,v), max(0,-v)). The parts have complementary supports and
/// reconstruct v exactly.
std::pair<Vec, Vec> split_parts(const Vec& v);

/// M^T M with exactly symmetric output.
Mat gram(const Mat& M);

Mat matmul(const DataMatrix& X, const Mat& B);     // X * B
Mat mat_t_mat(const Mat& W, const DataMatrix& X);  // W^T * X
Mat mat_mat_t(const DataMatrix& X, const Mat& H);  // X * H^T

}  // namespace nmfinit
