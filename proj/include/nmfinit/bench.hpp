#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmfinit/init.hpp"
#include "nmfinit/matrix.hpp"

namespace nmfinit {

enum class DatasetKind { DenseImage, SparseDocument, Synthetic };

struct Dataset {
    std::string name;
    DataMatrix matrix;
    DatasetKind kind = DatasetKind::Synthetic;
    std::vector<std::string> provenance;
};

enum class ImageFormat { Pgm, Png, Csv };

/// Directory of same-size grayscale images (or a CSV whose columns are
/// already vectorized images). Column j is image j flattened row-major,
/// values in [0,1]; column order is lexicographic by filename.
Dataset load_dense_images(const std::string& path, ImageFormat format);

/// Matrix Market coordinate file into CSR storage. Rejects negative values.
Dataset load_sparse_matrix(const std::string& path);

/// X = clip(W* H* + noise * E, 0) with W*, H*, E uniform(0,1) entries.
Dataset make_synthetic(Index m, Index n, Index rank_true, double noise, std::uint64_t seed);

struct PostStep {
    enum class Kind { None, Nnls, Hals, Mu } kind = Kind::None;
    int iters = 1;
};

std::string post_step_name(const PostStep& step);
PostStep parse_post_step(const std::string& name);

struct ExperimentSpec {
    std::vector<std::string> initializers;  // nnsvd-lrc | nndsvd | svd-nmf | random
    std::vector<Index> ranks;               // strictly increasing, each <= min(m,n)-1
    std::vector<PostStep> post_steps;       // empty behaves as {none}
    int repetitions = 5;                    // timing repetitions (plus one warm-up)
    std::uint64_t seed = 0;
    double delta = 0.05;
    double svd_tol = 0.0;
    int svd_power_iters = 2;
};

struct ResultRow {
    std::string dataset;
    std::string initializer;
    Index rank = 0;
    std::string post_step;
    double relative_error_percent = 0.0;
    double sparsity_w = 0.0;
    double sparsity_h = 0.0;
    double wall_time_s = 0.0;
    int correction_iters = 0;
};

/// One row per (initializer, rank, post step). wall_time_s is the median
/// initializer time over the repetitions (one warm-up discarded); post steps
/// reuse the deterministic factors and add only error/sparsity columns.
std::vector<ResultRow> run_experiment(const Dataset& data, const ExperimentSpec& spec);

/// Fixed-schema CSV (header = ResultRow field names). Formats are fixed so
/// identical rows serialize to identical bytes.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_result_csv(const std::string& path);

/// Plot-ready JSON: one series per (initializer, post step) with aligned
/// rank/error/time arrays.
void emit_plotdata(const std::vector<ResultRow>& rows, const std::string& path);

/// Declarative experiment file (JSON): dataset description plus the
/// ExperimentSpec fields. CLI flags override individual values.
struct BenchConfig {
    Dataset dataset;
    ExperimentSpec spec;
};
BenchConfig load_bench_config(const std::string& path);

/// Dispatch by canonical initializer name.
InitResult run_initializer(const std::string& name, const DataMatrix& X, const InitConfig& cfg);

}  // namespace nmfinit
