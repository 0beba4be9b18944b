#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "oscchain/specfun.hpp"
#include "oracles.hpp"

using oscchain::specfun::bessel_j;
using oscchain::specfun::bessel_j_integral;
using oscchain::specfun::bessel_j_integral_row;
using oscchain::specfun::bessel_j_row;

TEST_CASE("bessel_j spot values") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(3, 0.0) == 0.0);
    // frozen from the long-double power series oracle
    CHECK(bessel_j(5, 2.0) == doctest::Approx(0.0070396297558716855).epsilon(1e-12));
    CHECK(bessel_j(0, 2.0) == doctest::Approx(0.22389077914123567).epsilon(1e-13));
    // parity J_{-n} = (-1)^n J_n
    CHECK(bessel_j(-3, 1.0) == doctest::Approx(-bessel_j(3, 1.0)).epsilon(1e-15));
    CHECK(bessel_j(-3, 1.0) == doctest::Approx(-0.019563353982668406).epsilon(1e-12));
    CHECK(bessel_j(-4, 7.7) == doctest::Approx(bessel_j(4, 7.7)).epsilon(1e-15));
}

TEST_CASE("bessel_j domain errors") {
    CHECK_THROWS_AS(bessel_j(0, -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_j(2, std::nan("")), std::domain_error);
    CHECK_THROWS_AS(bessel_j(2, std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("bessel_j vs series oracle across the regime switch") {
    // the long-double series oracle itself cancels beyond x ~ 16, so the
    // large-x cross-check is against std::cyl_bessel_j below
    for (int n : {0, 1, 2, 5, 11, 17, 30}) {
        for (double x : {0.01, 0.5, 3.0, 9.0, 11.9, 12.1, 14.0, 16.0}) {
            double ref = static_cast<double>(oracle::series_bessel_j(n, x));
            // 1e-12 absolute is the contract; the series path loses ~7e-13 to
            // cancellation right below the regime switch
            CHECK(bessel_j(n, x) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("bessel_j vs std::cyl_bessel_j on the propagator domain") {
    double worst = 0.0;
    for (int n : {0, 1, 3, 10, 40, 100, 200}) {
        for (double x : {0.2, 1.0, 7.0, 13.0, 50.0, 180.0, 700.0, 4000.0, 10000.0}) {
            double ref = std::cyl_bessel_j(static_cast<double>(n), x);
            worst = std::max(worst, std::abs(bessel_j(n, x) - ref));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("bessel_j_row consistent with scalar path") {
    auto row = bessel_j_row(64, 37.5);
    for (int n = 0; n <= 64; n += 7)
        CHECK(row[static_cast<std::size_t>(n)] == doctest::Approx(bessel_j(n, 37.5)).epsilon(1e-13));
}

TEST_CASE("addition theorem J_n(2x) = sum_k J_{n-k}(x) J_k(x)") {
    double worst = 0.0;
    for (int n = 0; n <= 20; ++n) {
        for (double x : {0.3, 2.0, 7.5, 14.0, 21.0, 30.0}) {
            int K = static_cast<int>(x) + n + 40;  // tail terms < 1e-14
            double sum = 0.0;
            for (int k = -K; k <= K; ++k) sum += bessel_j(n - k, x) * bessel_j(k, x);
            worst = std::max(worst, std::abs(bessel_j(n, 2.0 * x) - sum));
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("asymptotic envelope |J_n(x)| <= 1.1 sqrt(2/(pi x)) for x >= 10 max(1,n)") {
    for (int n : {0, 1, 2, 5, 10, 25}) {
        for (double f : {10.0, 14.0, 33.0, 80.0}) {
            double x = f * std::max(1, n);
            CHECK(std::abs(bessel_j(n, x)) <= 1.1 * std::sqrt(2.0 / (std::numbers::pi * x)));
        }
    }
}

TEST_CASE("|J_n| <= 1 everywhere sampled") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xd(0.0, 300.0);
    std::uniform_int_distribution<int> nd(-40, 40);
    for (int i = 0; i < 300; ++i) CHECK(std::abs(bessel_j(nd(rng), xd(rng))) <= 1.0 + 1e-14);
}

TEST_CASE("onset of oscillation: restricted max sits at the right edge, height ~ n^{-1/3}") {
    double prev_loc = 0.0;
    for (int n : {8, 16, 32, 64, 128}) {
        double best = 0.0, loc = 0.0;
        for (double x = 0.0; x <= n; x += 0.01 * n) {
            double v = std::abs(bessel_j(n, x));
            if (v > best) {
                best = v;
                loc = x;
            }
        }
        CHECK(loc > prev_loc);  // grows monotonically with n
        CHECK(loc >= 0.95 * n);
        double scaled = best * std::cbrt(static_cast<double>(n));
        CHECK(scaled > 0.3);
        CHECK(scaled < 0.6);
        prev_loc = loc;
    }
}

TEST_CASE("bessel_j_integral spot values and identities") {
    CHECK(bessel_j_integral(1, 0.0) == 0.0);
    CHECK(bessel_j_integral(1, 2.0) ==
          doctest::Approx(1.0 - bessel_j(0, 2.0)).epsilon(1e-14));
    CHECK(bessel_j_integral(1, 2.0) == doctest::Approx(0.77610922085876433).epsilon(1e-13));
    // the integral of J_0 approaches 1 inside an oscillatory tail
    CHECK(bessel_j_integral(0, 50.0) == doctest::Approx(0.90141212258183461).epsilon(1e-11));
    CHECK_THROWS_AS(bessel_j_integral(0, -0.5), std::domain_error);
    CHECK_THROWS_AS(bessel_j_integral(-1, 0.5), std::domain_error);
}

TEST_CASE("bessel_j_integral vs adaptive quadrature oracle") {
    for (int n : {0, 1, 2, 3, 7, 10}) {
        for (double x : {0.5, 2.0, 7.5, 20.0, 55.0, 130.0}) {
            double ref = oracle::panel_integral(
                [n](double y) { return std::cyl_bessel_j(static_cast<double>(n), y); }, x, 1e-13);
            CHECK(bessel_j_integral(n, x) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("bessel_j_integral_row matches scalar evaluations") {
    auto row = bessel_j_integral_row(12, 33.0);
    for (int n = 0; n <= 12; ++n)
        CHECK(row[static_cast<std::size_t>(n)] == doctest::Approx(bessel_j_integral(n, 33.0)).epsilon(1e-13));
}
