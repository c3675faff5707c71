// pybind11 module exposing the main operations. Dense inputs are 2-D numpy
// arrays; sparse inputs are scipy.sparse CSR matrices (detected by their
// indptr/indices/data attributes).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nmfinit/bench.hpp"
#include "nmfinit/init.hpp"
#include "nmfinit/solve.hpp"
#include "nmfinit/tsvd.hpp"

namespace py = pybind11;
using namespace nmfinit;

namespace {

Mat mat_from_array(const py::array& arr, const char* name) {
    const auto a = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 2)
        throw py::value_error(std::string(name) + " must be a 2-D array");
    Mat out(a.shape(0), a.shape(1));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j) out(i, j) = r(i, j);
    return out;
}

py::array_t<double> array_from_mat(const Mat& M) {
    py::array_t<double> out({M.rows(), M.cols()});
    auto w = out.mutable_unchecked<2>();
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) w(i, j) = M(i, j);
    return out;
}

bool looks_like_csr(const py::object& obj) {
    return py::hasattr(obj, "indptr") && py::hasattr(obj, "indices") &&
           py::hasattr(obj, "data") && py::hasattr(obj, "shape");
}

DataMatrix data_matrix_from_py(const py::object& obj) {
    if (looks_like_csr(obj)) {
        py::object csr = obj;
        if (py::hasattr(obj, "tocsr")) csr = obj.attr("tocsr")();
        const auto shape = csr.attr("shape").cast<std::pair<Index, Index>>();
        const auto indptr = csr.attr("indptr").cast<std::vector<Index>>();
        const auto indices = csr.attr("indices").cast<std::vector<Index>>();
        const auto data = csr.attr("data").cast<std::vector<double>>();
        SpMat S(shape.first, shape.second);
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(data.size());
        for (Index i = 0; i < shape.first; ++i)
            for (Index k = indptr[i]; k < indptr[i + 1]; ++k)
                triplets.emplace_back(i, indices[k], data[k]);
        S.setFromTriplets(triplets.begin(), triplets.end());
        return DataMatrix::from_sparse(std::move(S));
    }
    return DataMatrix::from_dense(mat_from_array(obj.cast<py::array>(), "X"));
}

InitConfig make_config(Index rank, double delta, double svd_tol, int svd_power_iters,
                       std::uint64_t seed, int max_correction_iters) {
    InitConfig cfg;
    cfg.rank = rank;
    cfg.delta = delta;
    cfg.svd_tol = svd_tol;
    cfg.svd_power_iters = svd_power_iters;
    cfg.seed = seed;
    cfg.max_correction_iters = max_correction_iters;
    return cfg;
}

py::dict init_result_to_py(const InitResult& res) {
    py::dict out;
    out["W"] = array_from_mat(res.factors.W);
    out["H"] = array_from_mat(res.factors.H);
    out["svd_rank_used"] = res.svd_rank_used;
    out["correction_trace"] = res.correction_trace.errors;
    out["correction_iters"] = res.correction_trace.iterations();
    out["wall_time"] = res.wall_time;
    return out;
}

py::dict solve_result_to_py(const SolveResult& res) {
    py::dict out;
    out["W"] = array_from_mat(res.factors.W);
    out["H"] = array_from_mat(res.factors.H);
    out["trace"] = res.trace.errors;
    out["iters_run"] = res.iters_run;
    out["wall_time"] = res.wall_time;
    return out;
}

SolveOptions make_solve_options(int max_iters, double time_limit, double epsilon_guard,
                                double accel_alpha, double accel_eps, bool record_trace) {
    SolveOptions opts;
    opts.max_iters = max_iters;
    opts.time_limit = time_limit;
    opts.epsilon_guard = epsilon_guard;
    opts.accel_alpha = accel_alpha;
    opts.accel_eps = accel_eps;
    opts.record_trace = record_trace;
    return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "SVD-based NMF initializations and solvers";

    py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    m.def(
        "truncated_svd",
        [](const py::object& X, Index p, double tol, int power_iters, int oversample,
           int max_power_iters, std::uint64_t seed) {
            SvdOptions opts;
            opts.tol = tol;
            opts.power_iters = power_iters;
            opts.oversample = oversample;
            opts.max_power_iters = max_power_iters;
            opts.seed = seed;
            const SvdFactors S = truncated_svd(data_matrix_from_py(X), p, opts);
            py::array_t<double> sigma(S.sigma.size());
            auto w = sigma.mutable_unchecked<1>();
            for (Index i = 0; i < S.sigma.size(); ++i) w(i) = S.sigma[i];
            return py::make_tuple(array_from_mat(S.U), sigma, array_from_mat(S.V));
        },
        py::arg("X"), py::arg("p"), py::arg("tol") = 1e-8, py::arg("power_iters") = 2,
        py::arg("oversample") = 10, py::arg("max_power_iters") = 300, py::arg("seed") = 0,
        "Rank-p truncated SVD; returns (U, sigma, V) with V as columns.");

    const char* init_doc = "Returns dict with W, H, svd_rank_used, correction_trace, wall_time.";
    auto def_init = [&](const char* name, InitResult (*fn)(const DataMatrix&, const InitConfig&),
                        const char* doc) {
        m.def(
            name,
            [fn](const py::object& X, Index rank, double delta, double svd_tol,
                 int svd_power_iters, std::uint64_t seed, int max_correction_iters) {
                return init_result_to_py(
                    fn(data_matrix_from_py(X),
                       make_config(rank, delta, svd_tol, svd_power_iters, seed,
                                   max_correction_iters)));
            },
            py::arg("X"), py::arg("rank"), py::arg("delta") = 0.05, py::arg("svd_tol") = 0.0,
            py::arg("svd_power_iters") = 2, py::arg("seed") = 0,
            py::arg("max_correction_iters") = 100, doc);
    };
    def_init("nnsvd_lrc", &nnsvd_lrc, init_doc);
    def_init("nndsvd", &nndsvd, init_doc);
    def_init("svd_nmf", &svd_nmf, init_doc);
    def_init("random_init", static_cast<InitResult (*)(const DataMatrix&, const InitConfig&)>(
                                &random_init),
             init_doc);

    m.def(
        "mu_solve",
        [](const py::object& X, const py::array& W, const py::array& H, int max_iters,
           double time_limit, double epsilon_guard, bool record_trace) {
            FactorPair F{mat_from_array(W, "W"), mat_from_array(H, "H")};
            return solve_result_to_py(
                mu_solve(data_matrix_from_py(X), std::move(F),
                         make_solve_options(max_iters, time_limit, epsilon_guard, 0.5, 0.1,
                                            record_trace)));
        },
        py::arg("X"), py::arg("W"), py::arg("H"), py::arg("max_iters") = 100,
        py::arg("time_limit") = 0.0, py::arg("epsilon_guard") = 1e-16,
        py::arg("record_trace") = true);

    m.def(
        "ahals_solve",
        [](const py::object& X, const py::array& W, const py::array& H, int max_iters,
           double time_limit, double accel_alpha, double accel_eps, bool record_trace) {
            FactorPair F{mat_from_array(W, "W"), mat_from_array(H, "H")};
            return solve_result_to_py(
                ahals_solve(data_matrix_from_py(X), std::move(F),
                            make_solve_options(max_iters, time_limit, 1e-16, accel_alpha,
                                               accel_eps, record_trace)));
        },
        py::arg("X"), py::arg("W"), py::arg("H"), py::arg("max_iters") = 100,
        py::arg("time_limit") = 0.0, py::arg("accel_alpha") = 0.5, py::arg("accel_eps") = 0.1,
        py::arg("record_trace") = true);

    m.def(
        "ahals_solve_lowrank",
        [](const py::array& Y, const py::array& Z, const py::array& W, const py::array& H,
           int max_iters, double accel_alpha, double accel_eps, bool record_trace) {
            LowRankMatrix L{mat_from_array(Y, "Y"), mat_from_array(Z, "Z")};
            FactorPair F{mat_from_array(W, "W"), mat_from_array(H, "H")};
            return solve_result_to_py(
                ahals_solve(L, std::move(F),
                            make_solve_options(max_iters, 0.0, 1e-16, accel_alpha, accel_eps,
                                               record_trace)));
        },
        py::arg("Y"), py::arg("Z"), py::arg("W"), py::arg("H"), py::arg("max_iters") = 100,
        py::arg("accel_alpha") = 0.5, py::arg("accel_eps") = 0.1, py::arg("record_trace") = true,
        "A-HALS against the implicit product Y @ Z (never materialized).");

    m.def(
        "nnls_update_h",
        [](const py::object& X, const py::array& W, const py::array& H0) {
            return array_from_mat(
                nnls_update_h(data_matrix_from_py(X), mat_from_array(W, "W"),
                              mat_from_array(H0, "H0")));
        },
        py::arg("X"), py::arg("W"), py::arg("H0"));

    m.def(
        "low_rank_error",
        [](const py::array& Y, const py::array& Z, const py::array& W, const py::array& H) {
            return low_rank_error(LowRankMatrix{mat_from_array(Y, "Y"), mat_from_array(Z, "Z")},
                                  FactorPair{mat_from_array(W, "W"), mat_from_array(H, "H")});
        },
        py::arg("Y"), py::arg("Z"), py::arg("W"), py::arg("H"),
        "||Y@Z - W@H||_F via the Gram inner-product identity.");

    m.def(
        "relative_error",
        [](const py::object& X, const py::array& W, const py::array& H) {
            return relative_error(data_matrix_from_py(X),
                                  FactorPair{mat_from_array(W, "W"), mat_from_array(H, "H")});
        },
        py::arg("X"), py::arg("W"), py::arg("H"));

    m.def(
        "sparsity", [](const py::array& M) { return sparsity(mat_from_array(M, "M")); },
        py::arg("M"), "Fraction of exactly-zero entries.");

    m.def(
        "make_synthetic",
        [](Index m_, Index n_, Index rank_true, double noise, std::uint64_t seed) {
            return array_from_mat(make_synthetic(m_, n_, rank_true, noise, seed).matrix
                                      .materialize());
        },
        py::arg("m"), py::arg("n"), py::arg("rank_true"), py::arg("noise") = 0.05,
        py::arg("seed") = 0);
}
