#include <doctest.h>

#include <cstring>

#include "nmfinit/tsvd.hpp"
#include "oracles.hpp"

using namespace nmfinit;

namespace {

SvdOptions tight() {
    SvdOptions opts;
    opts.tol = 1e-11;
    return opts;
}

}  // namespace

TEST_SUITE("tsvd") {
    TEST_CASE("diagonal matrix") {
        Mat D = Mat::Zero(3, 3);
        D(0, 0) = 3;
        D(1, 1) = 2;
        D(2, 2) = 1;
        const auto S = truncated_svd(DataMatrix::from_dense(D), 2, tight());
        CHECK(S.sigma[0] == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(S.sigma[1] == doctest::Approx(2.0).epsilon(1e-10));
        const Mat recon = S.U * S.sigma.asDiagonal() * S.V.transpose();
        CHECK((D - recon).norm() == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("identity") {
        const auto S = truncated_svd(DataMatrix::from_dense(Mat(Mat::Identity(4, 4))), 1, tight());
        CHECK(S.sigma[0] == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("singular values match the Jacobi oracle") {
        const Mat X = oracle::random_uniform(50, 40, 5);
        const auto S = truncated_svd(DataMatrix::from_dense(X), 5, tight());
        const auto full = oracle::jacobi_svd(X);
        for (Index i = 0; i < 5; ++i)
            CHECK(S.sigma[i] == doctest::Approx(full.sigma[i]).epsilon(1e-8));
    }

    TEST_CASE("sparse input agrees with its dense materialization") {
        Rng rng(77);
        std::vector<Eigen::Triplet<double>> t;
        for (Index i = 0; i < 40; ++i)
            for (Index j = 0; j < 30; ++j)
                if (rng.uniform() < 0.15) t.emplace_back(i, j, rng.uniform());
        SpMat sp(40, 30);
        sp.setFromTriplets(t.begin(), t.end());
        const auto Ss = truncated_svd(DataMatrix::from_sparse(sp), 4, tight());
        const auto Sd = truncated_svd(DataMatrix::from_dense(Mat(sp)), 4, tight());
        for (Index i = 0; i < 4; ++i)
            CHECK(Ss.sigma[i] == doctest::Approx(Sd.sigma[i]).epsilon(1e-9));
    }

    TEST_CASE("Eckart-Young residual at desk scale") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const Index m = 100 - 10 * static_cast<Index>(seed);
            const Index n = 80 - 10 * static_cast<Index>(seed);
            const Index p = 4 + static_cast<Index>(seed);
            const Mat X = oracle::random_uniform(m, n, seed + 40);
            const auto S = truncated_svd(DataMatrix::from_dense(X), p, tight());
            const double resid = (X - S.U * S.sigma.asDiagonal() * S.V.transpose()).norm();
            const auto full = oracle::jacobi_svd(X);
            double tail = 0.0;
            for (Index i = p; i < full.sigma.size(); ++i) tail += full.sigma[i] * full.sigma[i];
            CHECK(resid == doctest::Approx(std::sqrt(tail)).epsilon(1e-6));
        }
    }

    TEST_CASE("leading pair of a positive matrix is nonnegative after sign fixing") {
        const Mat X = oracle::random_uniform(30, 25, 9).array() + 0.05;
        const auto S = truncated_svd(DataMatrix::from_dense(X), 3, tight());
        CHECK(S.U.col(0).minCoeff() >= -1e-10);
        CHECK(S.V.col(0).minCoeff() >= -1e-10);
        // triplets orthogonal to the first
        for (Index i = 1; i < 3; ++i) {
            CHECK(std::abs(S.U.col(i).dot(S.U.col(0))) <= 1e-8);
            CHECK(std::abs(S.V.col(i).dot(S.V.col(0))) <= 1e-8);
        }
    }

    TEST_CASE("deterministic given seed") {
        const Mat X = oracle::random_uniform(25, 20, 13);
        const auto a = truncated_svd(DataMatrix::from_dense(X), 4, tight());
        const auto b = truncated_svd(DataMatrix::from_dense(X), 4, tight());
        CHECK(std::memcmp(a.U.data(), b.U.data(), sizeof(double) * a.U.size()) == 0);
        CHECK(std::memcmp(a.V.data(), b.V.data(), sizeof(double) * a.V.size()) == 0);
        CHECK(std::memcmp(a.sigma.data(), b.sigma.data(), sizeof(double) * a.sigma.size()) == 0);
    }

    TEST_CASE("rank validation and convergence cap") {
        const DataMatrix X = DataMatrix::from_dense(oracle::random_uniform(6, 5, 1));
        CHECK_THROWS_AS(truncated_svd(X, 0, {}), RankTooLarge);
        CHECK_THROWS_AS(truncated_svd(X, 6, {}), RankTooLarge);

        // unreachable tolerance with a tiny pass cap
        const DataMatrix Y = DataMatrix::from_dense(oracle::random_uniform(40, 35, 2));
        SvdOptions opts;
        opts.tol = 1e-30;
        opts.max_power_iters = 2;
        opts.oversample = 2;
        CHECK_THROWS_AS(truncated_svd(Y, 10, opts), ConvergenceFailure);
    }

    TEST_CASE("zero matrix yields zero singular values and orthonormal factors") {
        const auto S = truncated_svd(DataMatrix::from_dense(Mat(Mat::Zero(8, 6))), 2, tight());
        CHECK(S.sigma.norm() == 0.0);
        CHECK((S.U.transpose() * S.U - Mat::Identity(2, 2)).norm() < 1e-12);
        CHECK((S.V.transpose() * S.V - Mat::Identity(2, 2)).norm() < 1e-12);
    }

    TEST_CASE("to_two_factor: square roots and zero singular values") {
        SvdFactors S;
        S.U = Mat::Zero(3, 2);
        S.U(0, 0) = 1;
        S.U(1, 1) = 1;
        S.V = Mat::Zero(4, 2);
        S.V(0, 0) = 1;
        S.V(2, 1) = 1;
        S.sigma = Vec(2);
        S.sigma << 4, 0;
        const auto L = to_two_factor(S);
        CHECK(L.Y(0, 0) == doctest::Approx(2.0));
        CHECK(L.Z(0, 0) == doctest::Approx(2.0));
        CHECK(L.Y.col(1).norm() == 0.0);
        CHECK(L.Z.row(1).norm() == 0.0);
    }

    TEST_CASE("to_two_factor reconstructs U diag(sigma) V^T") {
        // random orthonormal factors with a sorted spectrum
        Eigen::HouseholderQR<Mat> qru(oracle::random_gaussian(20, 6, 3));
        Eigen::HouseholderQR<Mat> qrv(oracle::random_gaussian(15, 6, 4));
        SvdFactors S;
        S.U = qru.householderQ() * Mat::Identity(20, 6);
        S.V = qrv.householderQ() * Mat::Identity(15, 6);
        S.sigma = Vec(6);
        S.sigma << 9, 5, 3.5, 1, 0.25, 0.01;
        const auto L = to_two_factor(S);
        const Mat direct = S.U * S.sigma.asDiagonal() * S.V.transpose();
        CHECK((L.Y * L.Z - direct).norm() / S.sigma.norm() < 1e-12);
    }
}
