#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "oscchain/chain.hpp"
#include "oscchain/specfun.hpp"
#include "oracles.hpp"

using namespace oscchain;

namespace {
ChainParams simple_finite(long n) {
    ChainParams p;
    p.n_particles = n;
    p.mass = 1.0;
    p.coupling = 1.0;
    p.binding = 0.0;
    return p;
}
ChainParams simple_infinite() {
    ChainParams p;
    p.n_particles = 0;
    p.mass = 1.0;
    p.coupling = 1.0;
    return p;
}
ChainParams bound_infinite(double gamma = 0.05) {
    ChainParams p;
    p.n_particles = 0;
    p.mass = 1.0;
    p.coupling = 1.0;
    p.binding = p.coupling * (1.0 / gamma - 2.0);
    return p;
}
}  // namespace

TEST_CASE("normal mode frequencies match the dispersion relation") {
    ChainParams p = simple_finite(8);
    NormalModeSpectrum s = normal_mode_frequencies(p);
    for (long a = 1; a <= 8; ++a) {
        double expect = 2.0 * std::sin(std::numbers::pi * a / 8.0);
        CHECK(s.frequencies[a - 1] == doctest::Approx(expect).epsilon(1e-14));
    }
    // K = 0: alpha = N is the zero mode
    REQUIRE(s.zero_modes.size() == 1);
    CHECK(s.zero_modes[0] == 8);

    SUBCASE("nu = 0 gives a flat spectrum sqrt(K/m)") {
        ChainParams q = p;
        q.coupling = 0.0;
        q.binding = 2.25;
        NormalModeSpectrum sq = normal_mode_frequencies(q);
        for (double w : sq.frequencies) CHECK(w == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(sq.zero_modes.empty());
    }
    SUBCASE("N=2, K=0: omega_1 = 2 nu / sqrt(m)") {
        ChainParams q = simple_finite(2);
        q.coupling = 2.0;
        q.mass = 0.5;
        NormalModeSpectrum sq = normal_mode_frequencies(q);
        CHECK(sq.frequencies[0] == doctest::Approx(2.0 * std::sqrt(2.0 / 0.5)).epsilon(1e-14));
    }
    SUBCASE("infinite chain is rejected") {
        CHECK_THROWS_AS(normal_mode_frequencies(simple_infinite()), std::invalid_argument);
    }
}

TEST_CASE("propagator initial conditions f_r(0) = delta_r0, g_r(0) = 0") {
    std::vector<double> t{0.0};
    for (auto kind : {PropagatorKind::InfiniteSimple, PropagatorKind::InfiniteBound}) {
        ChainParams p = kind == PropagatorKind::InfiniteSimple ? simple_infinite() : bound_infinite();
        Propagator pr = make_propagator(p, kind, t, 6);
        for (long r = -6; r <= 6; ++r) {
            CHECK(pr.f_at(0, r) == doctest::Approx(r == 0 ? 1.0 : 0.0).epsilon(1e-14));
            CHECK(pr.g_at(0, r) == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
    Propagator pr = make_propagator(simple_finite(16), PropagatorKind::FiniteDft, t);
    for (long r = 0; r < 16; ++r) {
        CHECK(pr.f_at(0, r) == doctest::Approx(r == 0 ? 1.0 : 0.0).epsilon(1e-12));
        CHECK(pr.g_at(0, r) == doctest::Approx(0.0).epsilon(1e-13));
    }
}

TEST_CASE("infinite simple chain: f_r = J_2r, Bessel recurrence for g differences") {
    ChainParams p = simple_infinite();
    std::vector<double> ts{0.7, 3.3, 11.0};
    Propagator pr = make_propagator(p, PropagatorKind::InfiniteSimple, ts);
    const double om = p.omega(), Om = p.big_omega();
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        double x = 2.0 * om * ts[ti];
        for (long r = -5; r <= 5; ++r) {
            CHECK(pr.f_at(ti, r) ==
                  doctest::Approx(specfun::bessel_j(static_cast<int>(2 * r), x)).epsilon(1e-13));
            // parity f_r = f_{-r}
            CHECK(pr.f_at(ti, r) == doctest::Approx(pr.f_at(ti, -r)).epsilon(1e-14));
            // neighbouring g differences close through the Bessel recurrence
            // int_0^x (J_{n-1} - J_{n+1}) dy = 2 J_n(x):
            //   g_{r+1} - g_r = -(Omega/omega) J_{2r+1}(2 omega t)
            double lhs = pr.g_at(ti, r + 1) - pr.g_at(ti, r);
            double rhs = -(Om / om) * specfun::bessel_j(static_cast<int>(2 * r + 1), x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11).scale(1.0));
        }
    }
}

TEST_CASE("finite-dft cross-oracle against the infinite Bessel forms") {
    // before the wavefront wraps, an N = 512 ring is indistinguishable from
    // the infinite chain
    ChainParams fin = simple_finite(512);
    ChainParams inf = simple_infinite();
    std::vector<double> ts{0.5, 10.0, 25.0, 40.0};
    Propagator pf = make_propagator(fin, PropagatorKind::FiniteDft, ts);
    Propagator pi = make_propagator(inf, PropagatorKind::InfiniteSimple, ts);
    double worst = 0.0;
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        for (long r = -30; r <= 30; ++r) {
            worst = std::max(worst, std::abs(pf.f_at(ti, r) - pi.f_at(ti, r)));
            worst = std::max(worst, std::abs(pf.g_at(ti, r) - pi.g_at(ti, r)));
            worst = std::max(worst, std::abs(pf.fdot_at(ti, r) - pi.fdot_at(ti, r)));
            worst = std::max(worst, std::abs(pf.gdot_at(ti, r) - pi.gdot_at(ti, r)));
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("window truncation is flagged") {
    ChainParams p = simple_infinite();
    std::vector<double> ts{30.0};
    Propagator small = make_propagator(p, PropagatorKind::InfiniteSimple, ts, 5);
    CHECK(small.truncated);
    Propagator ample = make_propagator(p, PropagatorKind::InfiniteSimple, ts);
    CHECK_FALSE(ample.truncated);
}

TEST_CASE("evolve_means: stationary lattice stays put") {
    ChainParams p = simple_finite(32);
    p.spacing = 1.5;
    std::vector<double> ts{0.0, 2.0, 17.0};
    Propagator pr = make_propagator(p, PropagatorKind::FiniteDft, ts);
    std::vector<double> q0(32), p0(32, 0.0);
    for (long i = 0; i < 32; ++i) q0[i] = p.site_origin(i);
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        Means m = evolve_means(pr, ti, q0, p0);
        for (long i = 0; i < 32; ++i) {
            CHECK(m.q[i] == doctest::Approx(q0[i]).epsilon(1e-12));
            CHECK(m.p[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("evolve_means: single kick matches direct ODE integration") {
    const long n = 48;
    ChainParams p = simple_finite(n);
    std::vector<double> q0(n, 0.0), p0(n, 0.0);
    p0[10] = 1.0;

    std::vector<double> ts{0.8, 3.7, 9.0};
    Propagator pr = make_propagator(p, PropagatorKind::FiniteDft, ts);

    oracle::ChainOde ode{p.mass, p.coupling, p.binding, p.spacing, q0, p0};
    double prev_t = 0.0;
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        ode.integrate_to(ts[ti] - prev_t, 2e-4);
        prev_t = ts[ti];
        Means m = evolve_means(pr, ti, q0, p0);
        for (long i = 0; i < n; ++i) {
            CHECK(m.q[i] == doctest::Approx(ode.q[i]).epsilon(1e-8).scale(1.0));
            CHECK(m.p[i] == doctest::Approx(ode.p[i]).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("evolve_means conserves total momentum and mean energy (K = 0)") {
    const long n = 64;
    ChainParams p = simple_finite(n);
    std::vector<double> q0(n), p0(n);
    for (long i = 0; i < n; ++i) {
        q0[i] = 0.05 * std::sin(2.0 * std::numbers::pi * 3.0 * i / n);
        p0[i] = 0.02 * std::cos(2.0 * std::numbers::pi * 5.0 * i / n) + 0.01;
    }
    double p_tot0 = std::accumulate(p0.begin(), p0.end(), 0.0);
    double e0 = mean_field_energy(p, q0, p0);
    std::vector<double> ts{1.0, 8.0, 40.0};
    Propagator pr = make_propagator(p, PropagatorKind::FiniteDft, ts);
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        Means m = evolve_means(pr, ti, q0, p0);
        double p_tot = std::accumulate(m.p.begin(), m.p.end(), 0.0);
        CHECK(p_tot == doctest::Approx(p_tot0).epsilon(1e-10));
        double e = mean_field_energy(p, m.q, m.p);
        CHECK(e == doctest::Approx(e0).epsilon(1e-10));
    }
}

TEST_CASE("infinite-bound propagator requires gamma < 0.1") {
    ChainParams p = bound_infinite(0.3);
    std::vector<double> ts{1.0};
    CHECK_THROWS_AS(make_propagator(p, PropagatorKind::InfiniteBound, ts), std::invalid_argument);
}

TEST_CASE("chain parameter validation") {
    ChainParams p;
    p.mass = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ChainParams{};
    p.coupling = 0.0;
    p.binding = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ChainParams{};
    p.n_particles = -3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
