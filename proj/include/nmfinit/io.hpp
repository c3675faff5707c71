#pragma once

#include <string>

#include "nmfinit/matrix.hpp"

namespace nmfinit {

/// Matrix Market coordinate format (1-based indices). Supported qualifiers:
/// matrix coordinate real|integer|pattern general|symmetric.
SpMat read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const DataMatrix& X);

/// Dense CSV, row-major, optional header line (detected: any non-numeric
/// field in the first row). Written with %.17g so round-trips are
/// value-exact.
RowMat read_dense_csv(const std::string& path);
void write_dense_csv(const std::string& path, const Mat& M);

/// Grayscale images, values scaled to [0,1] by the stated max value.
RowMat read_pgm(const std::string& path);
RowMat read_png_gray(const std::string& path);

}  // namespace nmfinit
