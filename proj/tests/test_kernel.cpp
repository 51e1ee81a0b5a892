#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "okr/kernel.hpp"

using namespace okr;

namespace {
Eigen::MatrixXd random_points(int n, int d, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) X(i, j) = u(rng);
    }
    return X;
}
}  // namespace

TEST_CASE("eval_kernel matches the closed form") {
    const KernelSpec spec = KernelSpec::gaussian(1.0);
    Eigen::VectorXd x(1), y(1);
    x << 0.0;
    y << 1.0;
    CHECK(eval_kernel(spec, x, x) == doctest::Approx(1.0));
    CHECK(eval_kernel(spec, x, y) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

    const KernelSpec wide = KernelSpec::gaussian(2.0);
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 1.0;
    b << -1.0, -1.0;
    CHECK(eval_kernel(wide, a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("eval_kernel symmetry and range on random pairs") {
    const KernelSpec spec = KernelSpec::gaussian(0.7);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd x(3), y(3);
        for (int j = 0; j < 3; ++j) {
            x(j) = u(rng);
            y(j) = u(rng);
        }
        const double k = eval_kernel(spec, x, y);
        CHECK(k == eval_kernel(spec, y, x));
        CHECK(k > 0.0);
        CHECK(k <= 1.0);
    }
}

TEST_CASE("eval_kernel rejects dimension mismatch") {
    const KernelSpec spec = KernelSpec::gaussian(1.0);
    Eigen::VectorXd x(2), y(3);
    x.setZero();
    y.setZero();
    CHECK_THROWS_AS((void)eval_kernel(spec, x, y), input_error);
}

TEST_CASE("KernelSpec validates sigma") {
    CHECK_THROWS_AS((void)KernelSpec::gaussian(0.0), input_error);
    CHECK_THROWS_AS((void)KernelSpec::gaussian(-1.0), input_error);
}

TEST_CASE("gram edge cases") {
    const KernelSpec spec = KernelSpec::gaussian(1.0);
    CHECK(gram(spec, Eigen::MatrixXd(0, 3)).size() == 0);

    Eigen::MatrixXd one(1, 2);
    one << 0.3, -0.7;
    const Eigen::MatrixXd K1 = gram(spec, one);
    CHECK(K1.rows() == 1);
    CHECK(K1(0, 0) == doctest::Approx(1.0));

    Eigen::MatrixXd far(2, 1);
    far << 0.0, 10.0;  // distance 10 sigma
    const Eigen::MatrixXd K2 = gram(spec, far);
    CHECK(K2(0, 1) == K2(1, 0));
    CHECK(K2(0, 1) < 2e-22);
}

TEST_CASE("gram is symmetric and PSD on random inputs") {
    const KernelSpec spec = KernelSpec::gaussian(0.9);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::MatrixXd X = random_points(15, 2, seed);
        const Eigen::MatrixXd K = gram(spec, X);
        CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK_NOTHROW((void)psd_eigenvalues(K));  // throws if non-PSD beyond tolerance
        CHECK(psd_eigenvalues(K).minCoeff() >= 0.0);
    }
}

TEST_CASE("psd_eigenvalues rejects indefinite matrices") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS((void)psd_eigenvalues(bad), numeric_error);
}

TEST_CASE("effective dimension of the identity") {
    const Eigen::MatrixXd I4 = Eigen::MatrixXd::Identity(4, 4);
    CHECK(effective_dimension(I4, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("effective dimension vanishes as lambda grows") {
    const KernelSpec spec = KernelSpec::gaussian(1.0);
    const Eigen::MatrixXd K = gram(spec, random_points(12, 2, 7));
    const double lam = 1e12;
    const double deff = effective_dimension(K, lam);
    CHECK(deff <= K.trace() / lam + 1e-15);
    CHECK(deff >= 0.0);
}

TEST_CASE("effective dimension agrees with a dense-solve oracle") {
    const KernelSpec spec = KernelSpec::gaussian(1.0);
    const Eigen::MatrixXd K = gram(spec, random_points(5, 2, 123));
    const double lam = 0.1;
    // independent route: trace of K (K + lam I)^-1 through a dense solve
    Eigen::MatrixXd reg = K;
    reg.diagonal().array() += lam;
    const Eigen::MatrixXd sol = reg.ldlt().solve(K);
    CHECK(effective_dimension(K, lam) == doctest::Approx(sol.trace()).epsilon(1e-8));
}

TEST_CASE("effective dimension bounds and monotonicity") {
    const KernelSpec spec = KernelSpec::gaussian(0.8);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const int n = 10;
        const Eigen::MatrixXd K = gram(spec, random_points(n, 3, seed));
        const Eigen::VectorXd eigs = psd_eigenvalues(K);
        double prev = std::numeric_limits<double>::infinity();
        for (double lam : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            const double deff = effective_dimension_from_eigenvalues(eigs, lam);
            CHECK(deff <= std::min(static_cast<double>(n), K.trace() / lam) + 1e-12);
            CHECK(deff <= prev + 1e-12);
            prev = deff;
        }
    }
    CHECK_THROWS_AS((void)effective_dimension(Eigen::MatrixXd::Identity(2, 2), 0.0), input_error);
}

TEST_CASE("spectral regret bound closed forms") {
    const Eigen::MatrixXd I4 = Eigen::MatrixXd::Identity(4, 4);
    const auto b = spectral_regret_bound(I4, 1.0, 1.0, 0.0);
    CHECK(b.spectral == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(b.relaxation >= b.spectral);

    const auto empty = spectral_regret_bound(Eigen::MatrixXd(0, 0), 2.0, 1.0, 3.0);
    CHECK(empty.spectral == doctest::Approx(6.0));
    CHECK(empty.relaxation == doctest::Approx(6.0));
}

TEST_CASE("spectral sum never exceeds its effective-dimension relaxation") {
    const KernelSpec spec = KernelSpec::gaussian(1.1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lam_u(-2.0, 2.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Eigen::MatrixXd K = gram(spec, random_points(10, 2, seed + 1000));
        const double lam = std::pow(10.0, lam_u(rng));
        const auto b = spectral_regret_bound(K, lam, 1.0, 0.5);
        CHECK(b.spectral <= b.relaxation + 1e-9);
    }
}
