#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nmfinit {

using Index = Eigen::Index;
using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
// Row-major sparse storage == compressed sparse row.
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

}  // namespace nmfinit
