#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "risfas/numerics.hpp"

using namespace risfas;

TEST_CASE("inv_erf basics") {
    CHECK(inv_erf(0.0) == 0.0);
    // round-trip through erf at a representative point
    const double x = inv_erf(std::erf(1.0));
    CHECK(std::abs(x - 1.0) < 1e-12);
    // frozen bisection-oracle value
    CHECK(inv_erf(0.5) == doctest::Approx(0.47693627620446987).epsilon(1e-13));
    CHECK(inv_erf(0.5) == doctest::Approx(oracles::inv_erf_bisect(0.5)).epsilon(1e-12));
    // odd function
    for (double p : {0.1, 0.5, 0.9, 0.999}) CHECK(inv_erf(-p) == -inv_erf(p));
    CHECK_THROWS_AS(inv_erf(1.0), std::domain_error);
    CHECK_THROWS_AS(inv_erf(-1.0), std::domain_error);
    CHECK_THROWS_AS(inv_erf(1.5), std::domain_error);
}

TEST_CASE("inv_erf round-trips erf on a grid") {
    for (int i = 1; i < 1000; ++i) {
        const double p = -0.999 + 1.998 * i / 1000.0;
        if (p == 0.0) continue;
        const double rt = std::erf(inv_erf(p));
        CHECK(std::abs(rt - p) <= 1e-12 * std::abs(p));
    }
}

TEST_CASE("std_normal_quantile") {
    CHECK(std_normal_quantile(0.5) == 0.0);
    CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-6));
    CHECK(std_normal_quantile(0.975) ==
          doctest::Approx(oracles::std_normal_quantile_bisect(0.975)).epsilon(1e-9));
    // symmetry u vs 1-u
    for (double u : {0.01, 0.2, 0.45, 0.3}) {
        CHECK(std_normal_quantile(u) == doctest::Approx(-std_normal_quantile(1.0 - u)).epsilon(1e-13));
    }
    // equals sqrt(2) erfinv(2u - 1)
    for (double u : {0.1, 0.3, 0.7, 0.99}) {
        CHECK(std_normal_quantile(u) ==
              doctest::Approx(std::sqrt(2.0) * inv_erf(2.0 * u - 1.0)).epsilon(1e-12));
    }
    // monotone on a grid and round-trips the CDF
    double prev = -1e308;
    for (int i = 1; i < 1000; ++i) {
        const double u = i / 1000.0;
        const double z = std_normal_quantile(u);
        CHECK(z > prev);
        prev = z;
        CHECK(std::abs(std_normal_cdf(z) - u) <= 1e-12 * u);
    }
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    // far tails still invert
    CHECK(std_normal_cdf(std_normal_quantile(1e-12)) == doctest::Approx(1e-12).epsilon(1e-10));
}

TEST_CASE("marcum_q_half against the series oracle") {
    CHECK(marcum_q_half(0.7, 0.0) == 1.0);
    CHECK(marcum_q_half(3.0, 0.0) == 1.0);
    CHECK(marcum_q_half(0.0, 1.0) == doctest::Approx(0.3173105078629141).epsilon(1e-12));
    CHECK(marcum_q_half(2.0, 3.0) ==
          doctest::Approx(oracles::marcum_q_half_series(2.0, 3.0)).epsilon(1e-11));
    // frozen from the mpmath cross-check of the series
    CHECK(marcum_q_half(2.0, 3.0) == doctest::Approx(0.15865554058302893).epsilon(1e-12));

    for (int i = 0; i <= 12; ++i) {
        for (int j = 0; j <= 12; ++j) {
            const double a = i * 10.0 / 12.0, b = j * 10.0 / 12.0;
            const double q = marcum_q_half(a, b);
            CHECK(q >= 0.0);
            CHECK(q <= 1.0);
            CHECK(std::abs(q - oracles::marcum_q_half_series(a, b)) < 1e-10);
        }
    }
    CHECK_THROWS_AS(marcum_q_half(-0.1, 1.0), std::domain_error);
    CHECK_THROWS_AS(marcum_q_half(1.0, -0.1), std::domain_error);
}

TEST_CASE("marcum_q_half monotonicity grid") {
    // non-increasing in b, non-decreasing in a
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(i * 10.0 / 19.0);
    for (double a : grid) {
        double prev = 2.0;
        for (double b : grid) {
            const double q = marcum_q_half(a, b);
            CHECK(q <= prev + 1e-15);
            prev = q;
        }
    }
    for (double b : grid) {
        double prev = -1.0;
        for (double a : grid) {
            const double q = marcum_q_half(a, b);
            CHECK(q >= prev - 1e-15);
            prev = q;
        }
    }
}

TEST_CASE("bessel_i_neg_half") {
    CHECK(bessel_i_neg_half(1.0) == doctest::Approx(1.2312002145929674).epsilon(1e-13));
    // power-series oracle across the working range
    for (double z = 0.01; z <= 30.0; z *= 1.35) {
        const double ref = oracles::bessel_i_neg_half_series(z);
        CHECK(bessel_i_neg_half(z) == doctest::Approx(ref).epsilon(1e-10));
    }
    // asymptotic behaviour of cosh: ratio to e^z/sqrt(2 pi z) tends to 1
    const double z = 50.0;
    const double asym = std::exp(z) / std::sqrt(2.0 * M_PI * z);
    CHECK(bessel_i_neg_half(z) / asym == doctest::Approx(1.0).epsilon(1e-2));
    CHECK_THROWS_AS(bessel_i_neg_half(0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_i_neg_half(-1.0), std::domain_error);
}

TEST_CASE("gauss_laguerre small orders") {
    const QuadratureRule r2 = gauss_laguerre(2);
    REQUIRE(r2.order == 2);
    CHECK(r2.nodes[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r2.nodes[1] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r2.weights[0] == doctest::Approx(0.8536).epsilon(1e-4));
    CHECK(r2.weights[1] == doctest::Approx(0.1464).epsilon(2e-4));

    // zeroth moment: weights of e^{-x} sum to 1
    for (int k : {1, 2, 5, 10, 20, 64}) {
        const QuadratureRule r = gauss_laguerre(k);
        double s = 0.0;
        for (double w : r.weights) s += w;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        for (int i = 1; i < r.order; ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
        CHECK(r.nodes.front() > 0.0);
        for (double w : r.weights) CHECK(w > 0.0);
    }

    // K=2 integrates x^3 exactly: Gamma(4) = 6
    double m3 = 0.0;
    for (int k = 0; k < 2; ++k) m3 += r2.weights[k] * std::pow(r2.nodes[k], 3);
    CHECK(m3 == doctest::Approx(6.0).epsilon(1e-10));

    CHECK_THROWS_AS(gauss_laguerre(0), std::domain_error);
    CHECK_THROWS_AS(gauss_laguerre(65), std::domain_error);
}

TEST_CASE("gauss_laguerre reproduces factorial moments to 2K-1") {
    for (int k : {2, 5, 10, 20}) {
        const QuadratureRule r = gauss_laguerre(k);
        double factorial = 1.0;
        for (int n = 0; n <= 2 * k - 1; ++n) {
            if (n > 0) factorial *= n;
            double q = 0.0;
            for (int i = 0; i < r.order; ++i) q += r.weights[i] * std::pow(r.nodes[i], n);
            CHECK(std::abs(q / factorial - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("mvn_cdf low-dimensional exact cases") {
    MvnAccuracy acc;
    acc.target_abs_error = 1e-5;

    // d=1 reduces to the univariate CDF
    Eigen::MatrixXd r1 = Eigen::MatrixXd::Identity(1, 1);
    CHECK(mvn_cdf(std::vector{0.0}, r1, acc).value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mvn_cdf(std::vector{1.3}, r1, acc).value ==
          doctest::Approx(std_normal_cdf(1.3)).epsilon(1e-14));

    // independent orthant
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Identity(2, 2);
    const MvnResult ortho = mvn_cdf(std::vector{0.0, 0.0}, r2, acc);
    CHECK(ortho.value == doctest::Approx(0.25).epsilon(4e-4));

    // correlated orthant: 1/4 + asin(rho)/(2 pi)
    r2(0, 1) = r2(1, 0) = 0.5;
    const MvnResult corr = mvn_cdf(std::vector{0.0, 0.0}, r2, acc);
    CHECK(std::abs(corr.value - 1.0 / 3.0) < 1e-4);
    CHECK(corr.accuracy_met);

    // general bivariate vs brute-force conditional integration
    const MvnResult g = mvn_cdf(std::vector{0.7, -0.4}, r2, acc);
    CHECK(std::abs(g.value - oracles::mvn2_brute(0.7, -0.4, 0.5)) < 1e-4);

    // trivariate vs nested Simpson
    Eigen::Matrix3d r3;
    r3 << 1.0, 0.3, -0.2, 0.3, 1.0, 0.4, -0.2, 0.4, 1.0;
    const MvnResult t = mvn_cdf(std::vector{0.5, 0.0, 1.0}, r3, acc);
    CHECK(std::abs(t.value - oracles::mvn3_brute({0.5, 0.0, 1.0}, r3)) < 1e-4);
}

TEST_CASE("mvn_cdf error contract and determinism") {
    MvnAccuracy acc;
    acc.target_abs_error = 1e-5;
    acc.seed = 42;

    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) r(i, j) = 0.3;

    const std::vector<double> b{0.5, 0.2, -0.1, 0.8};
    const MvnResult a1 = mvn_cdf(b, r, acc);
    const MvnResult a2 = mvn_cdf(b, r, acc);
    CHECK(a1.value == a2.value); // bitwise for fixed seed
    CHECK(a1.error == a2.error);

    acc.seed = 43;
    const MvnResult a3 = mvn_cdf(b, r, acc);
    CHECK(a3.value != a1.value); // different randomization
    CHECK(std::abs(a3.value - a1.value) < 3.0 * (a1.error + a3.error) + 1e-12);

    // budget exhaustion reports rather than loops
    MvnAccuracy tight;
    tight.target_abs_error = 1e-9;
    tight.max_samples = 1000;
    const MvnResult starved = mvn_cdf(b, r, tight);
    CHECK_FALSE(starved.accuracy_met);
    CHECK(starved.error > 1e-9);

    CHECK_THROWS_AS(mvn_cdf(std::vector{0.0, 0.0, 0.0}, r, acc), std::invalid_argument);
    MvnAccuracy bad;
    bad.target_abs_error = 0.5;
    CHECK_THROWS_AS(mvn_cdf(b, r, bad), std::invalid_argument);
}

TEST_CASE("mvn_cdf factorizes over identity and stays monotone") {
    MvnAccuracy acc;
    acc.target_abs_error = 1e-5;
    for (int d : {2, 4, 16}) {
        Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d, d);
        std::vector<double> b(d);
        for (int i = 0; i < d; ++i) b[i] = -0.5 + 0.15 * i;
        const MvnResult got = mvn_cdf(b, r, acc);
        double expect = 1.0;
        for (double x : b) expect *= std_normal_cdf(x);
        CHECK(std::abs(got.value - expect) <= 2.0 * acc.target_abs_error);
    }

    // monotone in each coordinate (within error bars)
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(3, 3);
    r(0, 1) = r(1, 0) = 0.6;
    r(1, 2) = r(2, 1) = -0.2;
    std::vector<double> base{0.0, 0.5, -0.3};
    const MvnResult v0 = mvn_cdf(base, r, acc);
    for (int i = 0; i < 3; ++i) {
        auto bumped = base;
        bumped[i] += 0.3;
        const MvnResult v1 = mvn_cdf(bumped, r, acc);
        CHECK(v1.value >= v0.value - (v0.error + v1.error));
    }
}
