#include "nmfinit/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <tuple>

#include "nmfinit/io.hpp"
#include "nmfinit/rng.hpp"
#include "nmfinit/solve.hpp"

namespace nmfinit {

namespace fs = std::filesystem;
using nlohmann::json;

Dataset load_dense_images(const std::string& path, ImageFormat format) {
    if (format == ImageFormat::Csv) {
        RowMat M = read_dense_csv(path);
        DataMatrix X = DataMatrix::from_dense(std::move(M));
        X.require_nonnegative("load_dense_images");
        return Dataset{fs::path(path).stem().string(), std::move(X), DatasetKind::DenseImage,
                       {path}};
    }

    const std::string ext = format == ImageFormat::Pgm ? ".pgm" : ".png";
    std::vector<std::string> files;
    {
        std::error_code ec;
        fs::directory_iterator it(path, ec);
        if (ec) throw UnreadableFile("cannot list directory " + path);
        for (const auto& entry : it) {
            if (!entry.is_regular_file()) continue;
            std::string e = entry.path().extension().string();
            std::transform(e.begin(), e.end(), e.begin(), ::tolower);
            if (e == ext) files.push_back(entry.path().string());
        }
    }
    if (files.empty()) throw UnreadableFile("no " + ext + " files in " + path);
    std::sort(files.begin(), files.end());

    Mat columns;
    Index pixels = 0;
    for (size_t j = 0; j < files.size(); ++j) {
        RowMat img = format == ImageFormat::Pgm ? read_pgm(files[j]) : read_png_gray(files[j]);
        if (j == 0) {
            pixels = img.size();
            columns.resize(pixels, static_cast<Index>(files.size()));
        } else if (img.size() != pixels) {
            throw MixedDimensions("image dimensions differ: " + files[j]);
        }
        // row-major storage: flat view is the row-major flattening
        columns.col(static_cast<Index>(j)) = Eigen::Map<const Vec>(img.data(), img.size());
    }

    DataMatrix X = DataMatrix::from_dense(Mat(columns));
    X.require_nonnegative("load_dense_images");
    return Dataset{fs::path(path).filename().string(), std::move(X), DatasetKind::DenseImage,
                   std::move(files)};
}

Dataset load_sparse_matrix(const std::string& path) {
    SpMat M = read_matrix_market(path);
    DataMatrix X = DataMatrix::from_sparse(std::move(M));
    X.require_nonnegative("load_sparse_matrix");
    return Dataset{fs::path(path).stem().string(), std::move(X), DatasetKind::SparseDocument,
                   {path}};
}

Dataset make_synthetic(Index m, Index n, Index rank_true, double noise, std::uint64_t seed) {
    if (rank_true < 1 || rank_true > std::min(m, n))
        throw RankTooLarge("make_synthetic: rank_true outside [1, min(m,n)]");
    Rng rng(seed);
    Mat W(m, rank_true), H(rank_true, n);
    for (Index j = 0; j < rank_true; ++j)
        for (Index i = 0; i < m; ++i) W(i, j) = rng.uniform();
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < rank_true; ++i) H(i, j) = rng.uniform();
    Mat X = W * H;
    if (noise != 0.0) {
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < m; ++i) X(i, j) += noise * rng.uniform();
    }
    X = X.cwiseMax(0.0);

    std::ostringstream name;
    name << "synth" << m << "x" << n << "r" << rank_true;
    return Dataset{name.str(), DataMatrix::from_dense(X), DatasetKind::Synthetic, {}};
}

std::string post_step_name(const PostStep& step) {
    switch (step.kind) {
        case PostStep::Kind::None: return "none";
        case PostStep::Kind::Nnls: return "nnls";
        case PostStep::Kind::Hals:
            return step.iters == 1 ? "hals" : "hals" + std::to_string(step.iters);
        case PostStep::Kind::Mu: return "mu" + std::to_string(step.iters);
    }
    return "none";
}

PostStep parse_post_step(const std::string& name) {
    if (name == "none") return {PostStep::Kind::None, 1};
    if (name == "nnls") return {PostStep::Kind::Nnls, 1};
    auto with_iters = [&](const std::string& prefix, PostStep::Kind kind) -> PostStep {
        const std::string tail = name.substr(prefix.size());
        int iters = 1;
        if (!tail.empty()) {
            try {
                iters = std::stoi(tail);
            } catch (...) {
                throw InputError("unknown post step '" + name + "'");
            }
            if (iters < 1) throw InputError("post step iterations must be >= 1");
        }
        return {kind, iters};
    };
    if (name.rfind("hals", 0) == 0) return with_iters("hals", PostStep::Kind::Hals);
    if (name.rfind("mu", 0) == 0) return with_iters("mu", PostStep::Kind::Mu);
    throw InputError("unknown post step '" + name + "'");
}

InitResult run_initializer(const std::string& name, const DataMatrix& X, const InitConfig& cfg) {
    if (name == "nnsvd-lrc") return nnsvd_lrc(X, cfg);
    if (name == "nndsvd") return nndsvd(X, cfg);
    if (name == "svd-nmf") return svd_nmf(X, cfg);
    if (name == "random") return random_init(X, cfg);
    throw InputError("unknown initializer '" + name + "'");
}

namespace {

void validate_spec(const Dataset& data, const ExperimentSpec& spec) {
    if (spec.initializers.empty()) throw InputError("experiment: no initializers");
    if (spec.ranks.empty()) throw InputError("experiment: no ranks");
    const Index limit = std::min(data.matrix.rows(), data.matrix.cols()) - 1;
    for (size_t i = 0; i < spec.ranks.size(); ++i) {
        if (spec.ranks[i] < 1 || spec.ranks[i] > limit)
            throw RankTooLarge("experiment: rank outside [1, min(m,n)-1]");
        if (i > 0 && spec.ranks[i] <= spec.ranks[i - 1])
            throw InputError("experiment: rank grid must be strictly increasing");
    }
    if (spec.repetitions < 1) throw InputError("experiment: repetitions must be >= 1");
    for (const auto& name : spec.initializers)
        if (name != "nnsvd-lrc" && name != "nndsvd" && name != "svd-nmf" && name != "random")
            throw InputError("unknown initializer '" + name + "'");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t k = v.size() / 2;
    return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

FactorPair apply_post_step(const DataMatrix& X, const FactorPair& base, const PostStep& step) {
    switch (step.kind) {
        case PostStep::Kind::None: return base;
        case PostStep::Kind::Nnls: {
            FactorPair F = base;
            F.H = nnls_update_h(X, F.W, F.H);
            return F;
        }
        case PostStep::Kind::Hals: {
            SolveOptions opts;
            opts.max_iters = step.iters;
            opts.record_trace = false;
            return ahals_solve(X, base, opts).factors;
        }
        case PostStep::Kind::Mu: {
            SolveOptions opts;
            opts.max_iters = step.iters;
            opts.record_trace = false;
            return mu_solve(X, base, opts).factors;
        }
    }
    return base;
}

}  // namespace

std::vector<ResultRow> run_experiment(const Dataset& data, const ExperimentSpec& spec) {
    validate_spec(data, spec);
    std::vector<PostStep> steps = spec.post_steps;
    if (steps.empty()) steps.push_back(PostStep{});

    std::vector<ResultRow> rows;
    for (const auto& name : spec.initializers) {
        for (const Index rank : spec.ranks) {
            InitConfig cfg;
            cfg.rank = rank;
            cfg.delta = spec.delta;
            cfg.svd_tol = spec.svd_tol;
            cfg.svd_power_iters = spec.svd_power_iters;
            cfg.seed = spec.seed;

            // Timing: one discarded warm-up, then the median over the
            // repetitions. Runs are deterministic, so the last factors stand
            // for all of them.
            InitResult result = run_initializer(name, data.matrix, cfg);  // warm-up
            std::vector<double> times;
            times.reserve(static_cast<size_t>(spec.repetitions));
            for (int rep = 0; rep < spec.repetitions; ++rep) {
                result = run_initializer(name, data.matrix, cfg);
                times.push_back(result.wall_time);
            }
            const double time_med = median(std::move(times));

            for (const PostStep& step : steps) {
                const FactorPair F = apply_post_step(data.matrix, result.factors, step);
                ResultRow row;
                row.dataset = data.name;
                row.initializer = name;
                row.rank = rank;
                row.post_step = post_step_name(step);
                row.relative_error_percent = 100.0 * relative_error(data.matrix, F);
                row.sparsity_w = sparsity(F.W);
                row.sparsity_h = sparsity(F.H);
                row.wall_time_s = time_med;
                row.correction_iters = result.correction_trace.iterations();
                rows.push_back(std::move(row));
            }
        }
    }

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.dataset, a.initializer, a.rank, a.post_step) <
               std::tie(b.dataset, b.initializer, b.rank, b.post_step);
    });
    return rows;
}

namespace {
constexpr const char* kCsvHeader =
    "dataset,initializer,rank,post_step,relative_error_percent,sparsity_w,sparsity_h,"
    "wall_time_s,correction_iters";
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw UnreadableFile("cannot open " + path + " for writing");
    std::fprintf(out, "%s\n", kCsvHeader);
    for (const ResultRow& r : rows)
        std::fprintf(out, "%s,%s,%lld,%s,%.2f,%.4f,%.4f,%.6f,%d\n", r.dataset.c_str(),
                     r.initializer.c_str(), static_cast<long long>(r.rank), r.post_step.c_str(),
                     r.relative_error_percent, r.sparsity_w, r.sparsity_h, r.wall_time_s,
                     r.correction_iters);
    std::fclose(out);
}

std::vector<ResultRow> read_result_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (line != kCsvHeader) throw ParseError(path + ": unexpected CSV header");

    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9) throw ParseError(path + ": malformed row");
        ResultRow r;
        r.dataset = fields[0];
        r.initializer = fields[1];
        r.rank = std::stoll(fields[2]);
        r.post_step = fields[3];
        r.relative_error_percent = std::stod(fields[4]);
        r.sparsity_w = std::stod(fields[5]);
        r.sparsity_h = std::stod(fields[6]);
        r.wall_time_s = std::stod(fields[7]);
        r.correction_iters = std::stoi(fields[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_plotdata(const std::vector<ResultRow>& rows, const std::string& path) {
    json doc;
    doc["datasets"] = json::array();

    // group by dataset, then by (initializer, post_step)
    std::vector<std::string> dataset_names;
    for (const auto& r : rows)
        if (std::find(dataset_names.begin(), dataset_names.end(), r.dataset) ==
            dataset_names.end())
            dataset_names.push_back(r.dataset);

    for (const auto& ds : dataset_names) {
        json entry;
        entry["dataset"] = ds;
        entry["series"] = json::array();
        std::vector<std::pair<std::string, std::string>> keys;
        for (const auto& r : rows) {
            if (r.dataset != ds) continue;
            const auto key = std::make_pair(r.initializer, r.post_step);
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }
        for (const auto& [init_name, post] : keys) {
            json series;
            series["initializer"] = init_name;
            series["post_step"] = post;
            json ranks = json::array(), errors = json::array(), times = json::array();
            for (const auto& r : rows) {
                if (r.dataset != ds || r.initializer != init_name || r.post_step != post)
                    continue;
                ranks.push_back(r.rank);
                errors.push_back(r.relative_error_percent);
                times.push_back(r.wall_time_s);
            }
            series["ranks"] = std::move(ranks);
            series["relative_error_percent"] = std::move(errors);
            series["wall_time_s"] = std::move(times);
            entry["series"].push_back(std::move(series));
        }
        doc["datasets"].push_back(std::move(entry));
    }

    std::ofstream out(path);
    if (!out) throw UnreadableFile("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }

    try {
        const json& ds = doc.at("dataset");
        const std::string kind = ds.at("kind").get<std::string>();
        Dataset dataset = [&]() -> Dataset {
            if (kind == "synthetic") {
                Dataset d = make_synthetic(ds.at("m").get<Index>(), ds.at("n").get<Index>(),
                                           ds.at("rank").get<Index>(),
                                           ds.value("noise", 0.05), ds.value("seed", 0ULL));
                if (ds.contains("name")) d.name = ds.at("name").get<std::string>();
                return d;
            }
            if (kind == "csv") return load_dense_images(ds.at("path"), ImageFormat::Csv);
            if (kind == "matrix-market") return load_sparse_matrix(ds.at("path"));
            if (kind == "image-dir") {
                const std::string fmt = ds.value("format", "pgm");
                return load_dense_images(ds.at("path"),
                                         fmt == "png" ? ImageFormat::Png : ImageFormat::Pgm);
            }
            throw InputError("unknown dataset kind '" + kind + "'");
        }();
        if (doc["dataset"].contains("name")) dataset.name = doc["dataset"]["name"];

        ExperimentSpec spec;
        spec.initializers = doc.value("initializers",
                                      std::vector<std::string>{"nnsvd-lrc", "nndsvd", "svd-nmf"});
        for (const auto& r : doc.at("ranks")) spec.ranks.push_back(r.get<Index>());
        if (doc.contains("post_steps"))
            for (const auto& s : doc["post_steps"])
                spec.post_steps.push_back(parse_post_step(s.get<std::string>()));
        spec.repetitions = doc.value("repetitions", 5);
        spec.seed = doc.value("seed", 0ULL);
        spec.delta = doc.value("delta", 0.05);
        spec.svd_tol = doc.value("svd_tol", 0.0);
        spec.svd_power_iters = doc.value("svd_power_iters", 2);
        return BenchConfig{std::move(dataset), std::move(spec)};
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace nmfinit
