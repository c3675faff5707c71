// Command-line front end: init / solve / bench / convert.

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "nmfinit/bench.hpp"
#include "nmfinit/io.hpp"
#include "nmfinit/solve.hpp"

namespace {

using namespace nmfinit;

struct DataArgs {
    std::string path;
    std::string format = "auto";
    std::string synthetic;  // "m,n,rank,noise"
    std::uint64_t seed = 0;
};

void add_data_flags(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--data", args.path, "input matrix: CSV, Matrix Market, or image directory");
    cmd->add_option("--format", args.format, "csv|mm|pgm|png|auto (default: by extension)")
        ->check(CLI::IsMember({"csv", "mm", "pgm", "png", "auto"}));
    cmd->add_option("--synthetic", args.synthetic,
                    "generate data instead: m,n,rank,noise (seeded by --seed)");
}

std::string detect_format(const std::string& path, const std::string& format) {
    if (format != "auto") return format;
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "csv") return "csv";
    if (ext == "mtx" || ext == "mm") return "mm";
    if (ext == "pgm") return "pgm";
    if (ext == "png") return "png";
    if (ext.empty()) return "pgm";  // directory of images
    throw InputError("cannot infer format of '" + path + "'; pass --format");
}

Dataset load_dataset(const DataArgs& args) {
    if (!args.synthetic.empty()) {
        long m = 0, n = 0, rank = 0;
        double noise = 0.0;
        if (std::sscanf(args.synthetic.c_str(), "%ld,%ld,%ld,%lf", &m, &n, &rank, &noise) != 4)
            throw InputError("--synthetic expects m,n,rank,noise");
        return make_synthetic(m, n, rank, noise, args.seed);
    }
    if (args.path.empty()) throw InputError("either --data or --synthetic is required");
    const std::string fmt = detect_format(args.path, args.format);
    if (fmt == "mm") return load_sparse_matrix(args.path);
    if (fmt == "csv") return load_dense_images(args.path, ImageFormat::Csv);
    return load_dense_images(args.path, fmt == "png" ? ImageFormat::Png : ImageFormat::Pgm);
}

void print_trace(const ErrorTrace& trace, const std::string& out_path) {
    std::FILE* out = std::fopen(out_path.c_str(), "w");
    if (!out) throw UnreadableFile("cannot open " + out_path + " for writing");
    std::fprintf(out, "iteration,error\n");
    for (size_t k = 0; k < trace.errors.size(); ++k)
        std::fprintf(out, "%zu,%.17g\n", k, trace.errors[k]);
    std::fclose(out);
}

int run(int argc, char** argv) {
    CLI::App app{"SVD-based NMF initializations (NNSVD-LRC, NNDSVD, SVD-NMF) and solvers"};
    app.require_subcommand(1);

    // ---- init ----
    auto* init_cmd = app.add_subcommand("init", "run one initialization, print error/sparsity/time");
    DataArgs init_data;
    add_data_flags(init_cmd, init_data);
    std::string init_name = "nnsvd-lrc";
    long rank = 10;
    double delta = 0.05;
    std::uint64_t seed = 0;
    std::string trace_path, out_path;
    init_cmd->add_option("--init", init_name, "nnsvd-lrc|nndsvd|svd-nmf|random")
        ->check(CLI::IsMember({"nnsvd-lrc", "nndsvd", "svd-nmf", "random"}));
    init_cmd->add_option("--rank", rank, "factorization rank r")->required();
    init_cmd->add_option("--delta", delta, "correction stopping proportion (default 0.05)");
    init_cmd->add_option("--seed", seed, "random seed");
    init_cmd->add_option("--trace", trace_path, "write the correction error trace as CSV");
    init_cmd->add_option("--out", out_path, "write W and H as <out>.W.csv / <out>.H.csv");

    // ---- solve ----
    auto* solve_cmd = app.add_subcommand("solve", "initializer followed by an NMF solver");
    DataArgs solve_data;
    add_data_flags(solve_cmd, solve_data);
    std::string solve_init = "nnsvd-lrc", solver = "mu";
    long solve_rank = 10, iters = 100;
    std::string solve_trace, solve_out;
    solve_cmd->add_option("--init", solve_init, "nnsvd-lrc|nndsvd|svd-nmf|random")
        ->check(CLI::IsMember({"nnsvd-lrc", "nndsvd", "svd-nmf", "random"}));
    solve_cmd->add_option("--solver", solver, "mu|ahals")->check(CLI::IsMember({"mu", "ahals"}));
    solve_cmd->add_option("--rank", solve_rank, "factorization rank r")->required();
    solve_cmd->add_option("--iters", iters, "outer iteration budget (default 100)");
    solve_cmd->add_option("--delta", delta, "correction stopping proportion");
    solve_cmd->add_option("--seed", seed, "random seed");
    solve_cmd->add_option("--trace", solve_trace, "write the relative-error trace as CSV");
    solve_cmd->add_option("--out", solve_out, "write W and H as <out>.W.csv / <out>.H.csv");

    // ---- bench ----
    auto* bench_cmd = app.add_subcommand("bench", "run a full experiment from a config file");
    std::string config_path, bench_out, plot_out;
    std::vector<long> override_ranks;
    std::vector<std::string> override_inits, override_posts;
    std::optional<int> override_reps;
    std::optional<std::uint64_t> override_seed;
    std::optional<double> override_delta;
    bench_cmd->add_option("--config", config_path, "experiment JSON file")->required();
    bench_cmd->add_option("--out", bench_out, "result CSV path")->required();
    bench_cmd->add_option("--plot", plot_out, "also write plot-ready JSON series");
    bench_cmd->add_option("--ranks", override_ranks, "override the rank grid");
    bench_cmd->add_option("--init", override_inits, "override the initializer list");
    bench_cmd->add_option("--post", override_posts, "override post steps (none|nnls|hals|mu<k>)");
    bench_cmd->add_option("--reps", override_reps, "override timing repetitions");
    bench_cmd->add_option("--seed", override_seed, "override the seed");
    bench_cmd->add_option("--delta", override_delta, "override delta");

    // ---- convert ----
    auto* convert_cmd = app.add_subcommand("convert", "image directory -> dense CSV matrix");
    std::string conv_dir, conv_format = "pgm", conv_out;
    convert_cmd->add_option("--data", conv_dir, "image directory")->required();
    convert_cmd->add_option("--format", conv_format, "pgm|png")
        ->check(CLI::IsMember({"pgm", "png"}));
    convert_cmd->add_option("--out", conv_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // malformed invocation is an input error
    }

    if (init_cmd->parsed()) {
        init_data.seed = seed;
        const Dataset data = load_dataset(init_data);
        InitConfig cfg;
        cfg.rank = rank;
        cfg.delta = delta;
        cfg.seed = seed;
        const InitResult res = run_initializer(init_name, data.matrix, cfg);
        std::printf("dataset=%s init=%s rank=%ld svd_rank=%lld\n", data.name.c_str(),
                    init_name.c_str(), rank, static_cast<long long>(res.svd_rank_used));
        std::printf("relative_error_percent=%.2f sparsity_w=%.4f sparsity_h=%.4f "
                    "correction_iters=%d time_s=%.6f\n",
                    100.0 * relative_error(data.matrix, res.factors), sparsity(res.factors.W),
                    sparsity(res.factors.H), res.correction_trace.iterations(), res.wall_time);
        if (!trace_path.empty()) print_trace(res.correction_trace, trace_path);
        if (!out_path.empty()) {
            write_dense_csv(out_path + ".W.csv", res.factors.W);
            write_dense_csv(out_path + ".H.csv", res.factors.H);
        }
        return 0;
    }

    if (solve_cmd->parsed()) {
        solve_data.seed = seed;
        const Dataset data = load_dataset(solve_data);
        InitConfig cfg;
        cfg.rank = solve_rank;
        cfg.delta = delta;
        cfg.seed = seed;
        const InitResult init_res = run_initializer(solve_init, data.matrix, cfg);
        SolveOptions opts;
        opts.max_iters = static_cast<int>(iters);
        const SolveResult res = solver == "mu"
                                    ? mu_solve(data.matrix, init_res.factors, opts)
                                    : ahals_solve(data.matrix, init_res.factors, opts);
        std::printf("dataset=%s init=%s solver=%s rank=%ld iters=%d\n", data.name.c_str(),
                    solve_init.c_str(), solver.c_str(), solve_rank, res.iters_run);
        std::printf("initial_error_percent=%.2f final_error_percent=%.2f time_s=%.6f\n",
                    100.0 * res.trace.errors.front(), 100.0 * res.trace.errors.back(),
                    res.wall_time);
        if (!solve_trace.empty()) print_trace(res.trace, solve_trace);
        if (!solve_out.empty()) {
            write_dense_csv(solve_out + ".W.csv", res.factors.W);
            write_dense_csv(solve_out + ".H.csv", res.factors.H);
        }
        return 0;
    }

    if (bench_cmd->parsed()) {
        BenchConfig config = load_bench_config(config_path);
        if (!override_ranks.empty())
            config.spec.ranks.assign(override_ranks.begin(), override_ranks.end());
        if (!override_inits.empty()) config.spec.initializers = override_inits;
        if (!override_posts.empty()) {
            config.spec.post_steps.clear();
            for (const auto& s : override_posts)
                config.spec.post_steps.push_back(parse_post_step(s));
        }
        if (override_reps) config.spec.repetitions = *override_reps;
        if (override_seed) config.spec.seed = *override_seed;
        if (override_delta) config.spec.delta = *override_delta;

        const auto rows = run_experiment(config.dataset, config.spec);
        emit_csv(rows, bench_out);
        if (!plot_out.empty()) emit_plotdata(rows, plot_out);
        std::printf("wrote %zu rows to %s\n", rows.size(), bench_out.c_str());
        return 0;
    }

    if (convert_cmd->parsed()) {
        const Dataset data = load_dense_images(
            conv_dir, conv_format == "png" ? ImageFormat::Png : ImageFormat::Pgm);
        write_dense_csv(conv_out, data.matrix.materialize());
        std::printf("wrote %lldx%lld matrix (%zu images) to %s\n",
                    static_cast<long long>(data.matrix.rows()),
                    static_cast<long long>(data.matrix.cols()), data.provenance.size(),
                    conv_out.c_str());
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const nmfinit::ConvergenceFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const nmfinit::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
