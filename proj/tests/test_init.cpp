#include <doctest.h>

#include <cstring>

#include "nmfinit/init.hpp"
#include "oracles.hpp"

using namespace nmfinit;

namespace {

// Independent assembly of the NNSVD-LRC population from an oracle SVD with
// the library's sign convention applied.
FactorPair assemble_from_oracle(const Mat& X, Index r, Index p) {
    auto full = oracle::jacobi_svd(X);
    for (Index i = 0; i < full.sigma.size(); ++i) {
        Index idx = 0;
        full.U.col(i).cwiseAbs().maxCoeff(&idx);
        if (full.U(idx, i) < 0.0) {
            full.U.col(i) = -full.U.col(i);
            full.V.col(i) = -full.V.col(i);
        }
    }
    Mat Y(X.rows(), p), Z(p, X.cols());
    for (Index i = 0; i < p; ++i) {
        Y.col(i) = std::sqrt(full.sigma[i]) * full.U.col(i);
        Z.row(i) = std::sqrt(full.sigma[i]) * full.V.col(i).transpose();
    }
    Mat W = Mat::Zero(X.rows(), r), H = Mat::Zero(r, X.cols());
    W.col(0) = Y.col(0).cwiseAbs();
    H.row(0) = Z.row(0).cwiseAbs();
    Index col = 1;
    for (Index j = 1; j < p && col < r; ++j) {
        W.col(col) = Y.col(j).cwiseMax(0.0);
        H.row(col) = Z.row(j).cwiseMax(0.0);
        if (++col >= r) break;
        W.col(col) = (-Y.col(j)).cwiseMax(0.0);
        H.row(col) = (-Z.row(j)).cwiseMax(0.0);
        ++col;
    }
    return {W, H};
}

InitConfig config(Index r, std::uint64_t seed = 0, double svd_tol = 0.0) {
    InitConfig cfg;
    cfg.rank = r;
    cfg.seed = seed;
    cfg.svd_tol = svd_tol;
    return cfg;
}

}  // namespace

TEST_SUITE("init") {
    TEST_CASE("svd rank rule") {
        CHECK(nnsvd_lrc_svd_rank(1) == 2);
        CHECK(nnsvd_lrc_svd_rank(5) == 4);
        CHECK(nnsvd_lrc_svd_rank(30) == 16);
        CHECK(nnsvd_lrc_svd_rank(60) == 31);

        const DataMatrix X = DataMatrix::from_dense(oracle::random_uniform(20, 15, 1));
        const auto res = nnsvd_lrc(X, config(5));
        CHECK(res.svd_rank_used == 4);
        CHECK(nndsvd(X, config(5)).svd_rank_used == 5);
        CHECK(svd_nmf(X, config(5)).svd_rank_used == 5);
    }

    TEST_CASE("rank-1 positive matrix is recovered exactly") {
        const Vec a = oracle::random_uniform(18, 1, 2).col(0).array() + 0.05;
        const Vec b = oracle::random_uniform(14, 1, 3).col(0).array() + 0.05;
        const DataMatrix X = DataMatrix::from_dense(Mat(a * b.transpose()));
        const auto res = nnsvd_lrc(X, config(1, 0, 1e-11));
        CHECK(relative_error(X, res.factors) < 1e-10);
        // W is proportional to a
        const double scale = res.factors.W(0, 0) / a[0];
        CHECK((res.factors.W.col(0) - scale * a).norm() < 1e-8 * a.norm());
    }

    TEST_CASE("population matches an independent oracle assembly") {
        const Mat Xm = oracle::random_uniform(60, 40, 4);
        const DataMatrix X = DataMatrix::from_dense(Xm);
        const Index r = 6;
        const Index p = nnsvd_lrc_svd_rank(r);

        const auto S = truncated_svd(X, p, {1e-12, 2, 10, 300, 0});
        const FactorPair populated = interleave_parts(to_two_factor(S), r);
        const FactorPair reference = assemble_from_oracle(Xm, r, p);
        const double err_lib = relative_error(X, populated);
        const double err_ref = relative_error(X, reference);
        CHECK(err_lib == doctest::Approx(err_ref).epsilon(1e-8));

        // the correction never worsens the error against X_p
        const auto res = nnsvd_lrc(X, config(r, 0, 1e-12));
        REQUIRE(res.correction_trace.errors.size() >= 2);
        CHECK(res.correction_trace.errors.back() <= res.correction_trace.errors.front());
    }

    TEST_CASE("pre-correction pairs have complementary supports") {
        const DataMatrix X = DataMatrix::from_dense(oracle::random_uniform(40, 30, 5));
        for (Index r : {5, 6, 9}) {
            const Index p = nnsvd_lrc_svd_rank(r);
            const auto L = to_two_factor(truncated_svd(X, p, {0.0, 2, 10, 300, 0}));
            const FactorPair F = interleave_parts(L, r);
            CHECK((F.W.array() >= 0.0).all());
            CHECK((F.H.array() >= 0.0).all());
            // columns (1,2), (3,4), ... share a triplet (0-based)
            for (Index c = 1; c + 1 < r; c += 2) {
                CHECK((F.W.col(c).array() * F.W.col(c + 1).array() == 0.0).all());
                CHECK((F.H.row(c).array() * F.H.row(c + 1).array() == 0.0).all());
            }
        }
    }

    TEST_CASE("correction trace is monotone and respects delta semantics") {
        const DataMatrix X = DataMatrix::from_dense(oracle::random_uniform(50, 35, 6));
        const auto res = nnsvd_lrc(X, config(8, 3));
        const auto& e = res.correction_trace.errors;
        REQUIRE(e.size() >= 2);
        for (size_t k = 1; k < e.size(); ++k) CHECK(e[k] <= e[k - 1] + 1e-12);
        // every iteration except the last improved by at least delta*e0
        for (size_t k = 1; k + 1 < e.size(); ++k) CHECK(e[k - 1] - e[k] >= 0.05 * e[0] - 1e-12);
        CHECK(res.correction_trace.iterations() <= 100);
    }

    TEST_CASE("nndsvd selection rule on a hand case") {
        // y = [1,-2], z = [3,-1]: positive parts win (3 > 2)
        Mat Y(2, 2), Z(2, 2);
        Y.col(0) << 1.0, 1.0;  // leading triplet, taken as absolute value
        Z.row(0) << 1.0, 1.0;
        Y.col(1) << 1.0, -2.0;
        Z.row(1) << 3.0, -1.0;
        const FactorPair F = nndsvd_select({Y, Z}, 2);
        CHECK(F.W(0, 1) == 1.0);
        CHECK(F.W(1, 1) == 0.0);
        CHECK(F.H(1, 0) == 3.0);
        CHECK(F.H(1, 1) == 0.0);
    }

    TEST_CASE("nndsvd picks the positive part of an all-nonnegative triplet") {
        Mat Y(3, 2), Z(2, 3);
        Y.col(0) << 1, 1, 1;
        Z.row(0) << 1, 1, 1;
        Y.col(1) << 0.5, 0.25, 0.0;
        Z.row(1) << 0.1, 0.2, 0.3;
        const FactorPair F = nndsvd_select({Y, Z}, 2);
        CHECK((F.W.col(1) - Y.col(1)).norm() == 0.0);
        CHECK((F.H.row(1) - Z.row(1)).norm() == 0.0);
    }

    TEST_CASE("r=1 on a positive matrix: all three initializers coincide") {
        const Mat Xm = oracle::random_uniform(25, 20, 7).array() + 0.02;
        const DataMatrix X = DataMatrix::from_dense(Xm);
        const auto dsvd = nndsvd(X, config(1, 0, 1e-11));
        const auto anmf = svd_nmf(X, config(1, 0, 1e-11));
        CHECK((dsvd.factors.W - anmf.factors.W).norm() < 1e-12);
        CHECK((dsvd.factors.H - anmf.factors.H).norm() < 1e-12);
        // LRC before its correction also takes (|y_1|, |z_1|); its SVD runs at
        // p = 2 with a different sketch, so equality holds to the tolerance.
        const auto L = to_two_factor(truncated_svd(X, 2, {1e-11, 2, 10, 300, 0}));
        const FactorPair pre = interleave_parts(L, 1);
        CHECK((pre.W - dsvd.factors.W).norm() < 1e-8 * dsvd.factors.W.norm());
        CHECK((pre.H - dsvd.factors.H).norm() < 1e-8 * dsvd.factors.H.norm());
    }

    TEST_CASE("svd_nmf is the absolute value of the two-factor form") {
        const DataMatrix X = DataMatrix::from_dense(oracle::random_uniform(40, 30, 8));
        const Index r = 4;
        const auto S = truncated_svd(X, r, {1e-11, 2, 10, 300, 0});
        const auto L = to_two_factor(S);
        const auto res = svd_nmf(X, config(r, 0, 1e-11));
        CHECK((res.factors.W - L.Y.cwiseAbs()).norm() == 0.0);
        CHECK((res.factors.H - L.Z.cwiseAbs()).norm() == 0.0);

        // error matches an oracle assembly with the same sign convention
        auto full = oracle::jacobi_svd(Mat(X.dense()));
        Mat Wo(X.rows(), r), Ho(r, X.cols());
        for (Index i = 0; i < r; ++i) {
            Wo.col(i) = (std::sqrt(full.sigma[i]) * full.U.col(i)).cwiseAbs();
            Ho.row(i) = (std::sqrt(full.sigma[i]) * full.V.col(i)).cwiseAbs().transpose();
        }
        CHECK(relative_error(X, res.factors) ==
              doctest::Approx(relative_error(X, {Wo, Ho})).epsilon(1e-10));
    }

    TEST_CASE("baseline reconstructions are elementwise nondecreasing in r") {
        const Mat Xm = oracle::random_uniform(60, 40, 9);
        const DataMatrix X = DataMatrix::from_dense(Xm);
        Mat prev_nndsvd, prev_svdnmf;
        for (Index r = 1; r <= 6; ++r) {
            const auto a = nndsvd(X, config(r, 0, 5e-14));
            const auto b = svd_nmf(X, config(r, 0, 5e-14));
            const Mat rec_a = a.factors.W * a.factors.H;
            const Mat rec_b = b.factors.W * b.factors.H;
            if (r > 1) {
                CHECK(((rec_a - prev_nndsvd).array() >= -1e-12).all());
                CHECK(((rec_b - prev_svdnmf).array() >= -1e-12).all());
            }
            prev_nndsvd = rec_a;
            prev_svdnmf = rec_b;
        }
    }

    TEST_CASE("random_init determinism, range, and scaling") {
        const auto a = random_init(30, 20, 4, 77);
        const auto b = random_init(30, 20, 4, 77);
        CHECK(std::memcmp(a.factors.W.data(), b.factors.W.data(),
                          sizeof(double) * a.factors.W.size()) == 0);
        CHECK((a.factors.W.array() >= 0.0).all());
        CHECK((a.factors.W.array() < 1.0).all());
        CHECK((a.factors.H.array() < 1.0).all());

        const DataMatrix X = DataMatrix::from_dense(oracle::random_uniform(30, 20, 10));
        const auto scaled = random_init(X, config(4, 77));
        const double wh_norm = (scaled.factors.W * scaled.factors.H).norm();
        CHECK(wh_norm == doctest::Approx(frobenius_norm(X)).epsilon(1e-12));
    }

    TEST_CASE("initializers are deterministic given (X, cfg)") {
        const DataMatrix X = DataMatrix::from_dense(oracle::random_uniform(35, 25, 11));
        const auto a = nnsvd_lrc(X, config(7, 5));
        const auto b = nnsvd_lrc(X, config(7, 5));
        CHECK(std::memcmp(a.factors.W.data(), b.factors.W.data(),
                          sizeof(double) * a.factors.W.size()) == 0);
        CHECK(std::memcmp(a.factors.H.data(), b.factors.H.data(),
                          sizeof(double) * a.factors.H.size()) == 0);
    }

    TEST_CASE("rank-deficient input: zero columns are re-seeded, result finite") {
        // exact rank 2, request r = 4 (so some sigma_i = 0)
        const Mat A = oracle::random_uniform(20, 2, 12);
        const Mat B = oracle::random_uniform(2, 15, 13);
        const DataMatrix X = DataMatrix::from_dense(Mat(A * B));
        const auto res = nnsvd_lrc(X, config(4, 1));
        CHECK(res.factors.W.allFinite());
        CHECK(res.factors.H.allFinite());
        CHECK((res.factors.W.array() >= 0.0).all());
        for (Index l = 0; l < 4; ++l) CHECK(res.factors.W.col(l).norm() > 0.0);
        // still a decent rank-2-capable factorization after correction
        CHECK(relative_error(X, res.factors) < 0.5);
    }

    TEST_CASE("config validation") {
        const DataMatrix X = DataMatrix::from_dense(oracle::random_uniform(10, 8, 14));
        InitConfig bad = config(3);
        bad.delta = 0.0;
        CHECK_THROWS_AS(nnsvd_lrc(X, bad), InputError);
        CHECK_THROWS_AS(nnsvd_lrc(X, config(8)), RankTooLarge);   // needs r <= min-1
        CHECK_THROWS_AS(nndsvd(X, config(9)), RankTooLarge);      // needs r <= min
        CHECK_NOTHROW(nndsvd(X, config(8)));
        Mat neg = oracle::random_uniform(10, 8, 15);
        neg(0, 0) = -0.5;
        CHECK_THROWS_AS(nnsvd_lrc(DataMatrix::from_dense(neg), config(3)), NegativeEntry);
    }
}
