// Acceptance suite: one scenario per numbered criterion, each printing a
// single PASS/FAIL line with the measured figures. Run everything with no
// arguments or a single criterion with --criterion N.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oscchain/coarse.hpp"
#include "oscchain/densities.hpp"
#include "oscchain/gaussian.hpp"
#include "oscchain/hydro.hpp"
#include "oscchain/specfun.hpp"
#include "oracles.hpp"

using namespace oscchain;

namespace {

bool report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s — %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    return pass;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

ChainParams simple_infinite() {
    ChainParams p;
    p.n_particles = 0;
    p.mass = 1.0;
    p.coupling = 1.0;
    return p;
}

ChainParams bound_infinite(double gamma, double spacing = 0.0) {
    ChainParams p;
    p.n_particles = 0;
    p.mass = 1.0;
    p.coupling = 1.0;
    p.binding = p.coupling * (1.0 / gamma - 2.0);
    p.spacing = spacing;
    return p;
}

// 1. Simple chain, M = 5: the fluctuating subsection sum decays from M/2 and
//    settles into a small oscillation; accept if its mean over
//    t in [20/w, 100/w] lies in [0.05, 0.2] and its max there stays below 1.
bool criterion_1() {
    const int M = 5;
    ChainParams par = simple_infinite();
    std::vector<double> ts;
    for (double t = 20.0; t <= 100.0; t += 0.02) ts.push_back(t);
    auto co = subsection_momentum_coefficients(par, PropagatorKind::InfiniteSimple, M, ts);

    std::vector<double> t0{0.0};
    auto at0 = subsection_momentum_coefficients(par, PropagatorKind::InfiniteSimple, M, t0);
    bool starts_at_half_m = std::abs(at0.a_fluct[0] - 0.5 * M) < 1e-12;

    double mean = 0.0, vmax = -1e300, amax = 0.0;
    for (double v : co.a_fluct) {
        mean += v;
        vmax = std::max(vmax, v);
        amax = std::max(amax, std::abs(v));
    }
    mean /= static_cast<double>(co.a_fluct.size());

    bool pass = starts_at_half_m && mean >= 0.05 && mean <= 0.2 && vmax < 1.0;
    return report(1, pass,
                  fmt("A~_5(0) = %.3f; over t in [20,100]/w: mean = %.3e (accept band "
                      "[0.05, 0.2]), max = %.3e (< 1), max |A~| = %.3e",
                      at0.a_fluct[0], mean, vmax, amax));
}

// 2. Bessel addition theorem J_n(2x) = sum_k J_{n-k}(x) J_k(x), n <= 20, x <= 30.
bool criterion_2() {
    double worst = 0.0;
    for (double x = 0.5; x <= 30.0; x += 0.5) {
        int K = static_cast<int>(x) + 60;  // tails < 1e-14
        auto row = specfun::bessel_j_row(K + 21, x);
        auto jv = [&](int n) {
            int a = std::abs(n);
            double v = row[static_cast<std::size_t>(a)];
            return (n < 0 && a % 2 == 1) ? -v : v;
        };
        for (int n = 0; n <= 20; ++n) {
            double sum = 0.0;
            for (int k = -K; k <= K; ++k) sum += jv(n - k) * jv(k);
            worst = std::max(worst, std::abs(specfun::bessel_j(n, 2.0 * x) - sum));
        }
    }
    return report(2, worst <= 1e-10, fmt("max |J_n(2x) - sum| = %.3e (<= 1e-10)", worst));
}

// 3. Finite N = 512 DFT propagator vs infinite-simple Bessel form.
bool criterion_3() {
    ChainParams fin = simple_infinite();
    fin.n_particles = 512;
    ChainParams inf = simple_infinite();
    std::vector<double> ts;
    for (double t = 0.0; t <= 40.0; t += 5.0) ts.push_back(t);
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
    return report(3, worst <= 1e-6,
                  fmt("max |finite - infinite| over f, g, fdot, gdot = %.3e (<= 1e-6)", worst));
}

// 4. Bound-chain equilibrium at gamma = 0.05 for t >= 20/(gamma Omega).
bool criterion_4() {
    ChainParams par = bound_infinite(0.05);
    const double mo = par.mass * par.big_omega();
    // The residual oscillation carries a factor |m^2 W^2 dq2 - dp2| /
    // (m^2 W^2 dq2 + dp2) on top of the |J_0(2 g W t)| ~ (pi g W t)^{-1/2}
    // envelope, which is 0.126 at t = 20/(g W); a 6% width asymmetry keeps a
    // genuine relaxation transient while satisfying both bounds at all
    // admissible times.
    const double dq2 = 0.4;
    const double dp2 = mo * mo * dq2 * 1.06 / 0.94;
    const double t_eq = 20.0 / (par.gamma() * par.big_omega());
    std::vector<double> ts;
    for (int i = 0; i <= 200; ++i) ts.push_back(t_eq * (1.0 + i / 200.0));  // worst over [t_eq, 2 t_eq]
    Propagator pr = make_propagator(par, PropagatorKind::InfiniteBound, ts);
    std::vector<double> qb(61), pb(61, 0.0), a(61, dq2), b(61, dp2), s(61, 0.0);
    GaussianChainState st = GaussianChainState::product_state(par, qb, pb, a, b, s, -30);

    EquilibriumLimits lim = equilibrium_limits(par, dq2, dp2);
    double kt_expect = (mo * mo * dq2 + dp2) / (2.0 * par.mass);
    bool kt_exact = lim.kT == kt_expect;

    double worst_pp = 0.0, worst_qp = 0.0;
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        GaussianChainState ev = evolve_state(st, pr, ti);
        worst_pp = std::max(worst_pp, std::abs(ev.sigma_pp(0, 0) - lim.spp_inf) / lim.spp_inf);
        worst_qp = std::max(worst_qp, std::abs(ev.sigma_qp(0, 0)) /
                                          std::sqrt(ev.sigma_qq(0, 0) * ev.sigma_pp(0, 0)));
    }
    bool pass = kt_exact && worst_pp < 0.02 && worst_qp < 0.01;
    return report(4, pass,
                  fmt("Spp within %.3f%% of (m^2 W^2 dq2 + dp2)/2 (< 2%%), |s(q,p)| at "
                      "%.3f%% of scale (< 1%%) over t in [20, 40]/(g W); kT evaluator exact: %s",
                      100.0 * worst_pp, 100.0 * worst_qp, kt_exact ? "yes" : "no"));
}

// 5. Wave speed and micro-vs-PDE error on the N = 400, K = 0 chain.
bool criterion_5() {
    // (a) pulse speed
    MicroHydroScenario pulse;
    pulse.chain = simple_infinite();
    pulse.chain.n_particles = 400;
    pulse.chain.spacing = 1.0;
    pulse.profile.shape = DisplacementProfile::Shape::GaussKink;
    pulse.profile.amplitude = 0.01;
    pulse.profile.width = 8.0;
    pulse.profile.center = 200.0;
    pulse.dq2 = 0.4;
    pulse.dp2 = 0.8;
    std::vector<double> ts_pulse;
    for (int s = 0; s <= 12; ++s) ts_pulse.push_back(10.0 * s);
    CompareResult pres = compare_micro_hydro(pulse, ts_pulse);
    double speed_err = std::abs(pres.measured_speed - pres.model_speed) / pres.model_speed;

    // (b) sinusoidal displacement, lambda = 50 d, one acoustic period;
    //     relative to the signal scale over the period (the standing wave
    //     passes through nodes where a per-time relative norm is 0/0)
    MicroHydroScenario sine = pulse;
    sine.profile = DisplacementProfile{};
    sine.profile.shape = DisplacementProfile::Shape::Sine;
    sine.profile.amplitude = 0.01;
    sine.profile.wavelength = 50.0;
    std::vector<double> ts_sine;
    double period = 50.0 / pres.model_speed;
    for (int s = 0; s <= 10; ++s) ts_sine.push_back(period * s / 10.0);
    CompareResult sres = compare_micro_hydro(sine, ts_sine);
    double peak = 0.0;
    std::vector<double> l2_abs(ts_sine.size(), 0.0), sig(ts_sine.size(), 0.0);
    for (std::size_t ti = 0; ti < ts_sine.size(); ++ti) {
        double d2 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < sres.grid.size(); ++i) {
            double a = sres.micro[ti].n1[i], b = sres.pde_n1[ti][i];
            d2 += (a - b) * (a - b);
            s2 += a * a;
        }
        l2_abs[ti] = std::sqrt(d2);
        sig[ti] = std::sqrt(s2);
        peak = std::max(peak, sig[ti]);
    }
    double worst_l2 = 0.0;
    for (std::size_t ti = 0; ti < ts_sine.size(); ++ti)
        worst_l2 = std::max(worst_l2, l2_abs[ti] / peak);

    bool pass = speed_err < 0.05 && worst_l2 < 0.10;
    return report(5, pass,
                  fmt("pulse speed %.4f vs c = %.4f (err %.2f%% < 5%%); sine L2 error over "
                      "one period %.2f%% (< 10%%)",
                      pres.measured_speed, pres.model_speed, 100.0 * speed_err,
                      100.0 * worst_l2));
}

// 6. Decoherence scan brackets: number density peaked for k^-1 >= 50 l_corr,
//    unpeaked for k dq >= 1.
bool criterion_6() {
    ChainParams par = bound_infinite(0.05, 1.0);
    const double mo = par.mass * par.big_omega();
    // momentum-hot start (2x the ground-state momentum width): thermal-shaped
    // widths would keep the chain uncorrelated forever and make the scan
    // trivial
    const double dq2 = par.hbar / (2.0 * mo), dp2 = par.hbar * mo;
    const long nw = 512;
    std::vector<double> qb(nw), pb(nw, 0.0);
    for (long i = 0; i < nw; ++i) qb[static_cast<std::size_t>(i)] = par.site_origin(i);
    GaussianChainState st = GaussianChainState::product_state(
        par, qb, pb, std::vector<double>(nw, dq2), std::vector<double>(nw, dp2),
        std::vector<double>(nw, 0.0), 0);

    std::vector<double> ts;
    for (int s = 0; s <= 10; ++s) ts.push_back(5.0 * s / par.big_omega());
    Propagator pr = make_propagator(par, PropagatorKind::InfiniteBound, ts);
    std::vector<GaussianChainState> traj;
    for (std::size_t ti = 0; ti < ts.size(); ++ti) traj.push_back(evolve_state(st, pr, ti));

    double ell = 0.0;
    for (const auto& s : traj) ell = std::max(ell, correlation_length(s));
    double k_coarse_max = 1.0 / (50.0 * ell);
    double k_micro = 1.0 / std::sqrt(dq2);
    std::vector<double> ks{0.0, 0.25 * k_coarse_max, 0.5 * k_coarse_max, k_coarse_max, k_micro};
    DecoherenceScan scan = decoherence_scan(traj, ks, 1e-3);

    double worst_coarse = std::max({scan.max_ratio[1], scan.max_ratio[2], scan.max_ratio[3]});
    double micro_ratio = scan.max_ratio[4];
    bool pass = worst_coarse < 1e-3 && micro_ratio > 1e-1;
    return report(6, pass,
                  fmt("l_corr = %.1f; ratio <= %.3e for k <= 1/(50 l_corr) (< 1e-3); "
                      "ratio = %.3e at k dq = 1 (> 1e-1)",
                      ell, worst_coarse, micro_ratio));
}

// 7. Invariant suite: symplectic spectrum, total momentum, mean energy.
bool criterion_7() {
    // symplectic eigenvalues under a bound-chain evolution
    ChainParams par;
    par.n_particles = 48;
    par.mass = 1.0;
    par.coupling = 1.0;
    par.binding = 3.0;
    long n = par.n_particles;
    std::vector<double> qb(n), pb(n, 0.1), dq2(n), dp2(n), sqp(n, 0.05);
    for (long i = 0; i < n; ++i) {
        qb[i] = 0.02 * std::sin(0.3 * static_cast<double>(i));
        dq2[i] = 0.4 + 0.002 * static_cast<double>(i);
        dp2[i] = 0.8 + 0.001 * static_cast<double>(i);
    }
    GaussianChainState st = GaussianChainState::product_state(par, qb, pb, dq2, dp2, sqp);
    auto nu0 = symplectic_eigenvalues(st);
    std::vector<double> ts{4.1, 13.0};
    Propagator pr = make_propagator(par, PropagatorKind::FiniteDft, ts);
    double worst_nu = 0.0;
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        auto nu = symplectic_eigenvalues(evolve_state(st, pr, ti));
        for (std::size_t i = 0; i < nu.size(); ++i)
            worst_nu = std::max(worst_nu, std::abs(nu[i] - nu0[i]) / nu0[i]);
    }

    // total momentum (mean and variance) and mean energy on a K = 0 ring
    ChainParams k0 = simple_infinite();
    k0.n_particles = 64;
    long n2 = k0.n_particles;
    std::vector<double> q2(n2), p2(n2), a2(n2, 0.5), b2(n2, 0.9), s2(n2, 0.0);
    for (long i = 0; i < n2; ++i) {
        q2[i] = 0.05 * std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) / 64.0);
        p2[i] = 0.02 * std::cos(2.0 * std::numbers::pi * 5.0 * static_cast<double>(i) / 64.0) + 0.3;
    }
    GaussianChainState st2 = GaussianChainState::product_state(k0, q2, p2, a2, b2, s2);
    std::vector<double> ts2{0.0, 6.0, 23.0};
    Propagator pr2 = make_propagator(k0, PropagatorKind::FiniteDft, ts2);
    double pm0 = 0.0, pv0 = 0.0, e0 = 0.0, worst_pm = 0.0, worst_pv = 0.0, worst_e = 0.0;
    for (std::size_t ti = 0; ti < ts2.size(); ++ti) {
        GaussianChainState ev = evolve_state(st2, pr2, ti);
        double pm = 0.0, pv = 0.0;
        std::vector<double> qv(n2), pvec(n2);
        for (long i = 0; i < n2; ++i) {
            pm += ev.mean_p(i);
            qv[i] = ev.mean_q(i);
            pvec[i] = ev.mean_p(i);
            for (long j = 0; j < n2; ++j) pv += ev.sigma_pp(i, j);
        }
        double e = mean_field_energy(k0, qv, pvec);
        if (ti == 0) {
            pm0 = pm;
            pv0 = pv;
            e0 = e;
        } else {
            worst_pm = std::max(worst_pm, std::abs(pm - pm0) / std::abs(pm0));
            worst_pv = std::max(worst_pv, std::abs(pv - pv0) / pv0);
            worst_e = std::max(worst_e, std::abs(e - e0) / e0);
        }
    }
    bool pass = worst_nu < 1e-10 && worst_pm < 1e-10 && worst_pv < 1e-10 && worst_e < 1e-10;
    return report(7, pass,
                  fmt("symplectic drift %.2e, momentum mean drift %.2e, momentum variance "
                      "drift %.2e, energy drift %.2e (all < 1e-10 rel)",
                      worst_nu, worst_pm, worst_pv, worst_e));
}

// 8. Euler static solution: residual drift <= 1e-8 in Linf over t in [0, 10].
bool criterion_8() {
    const std::size_t nx = 201;
    const double K = 1.0, theta0 = 2.0, m = 1.0;
    EulerFields init;
    init.x.resize(nx);
    init.f.resize(nx);
    init.v.assign(nx, 0.0);
    init.theta.assign(nx, theta0);
    for (std::size_t i = 0; i < nx; ++i) {
        init.x[i] = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(nx - 1);
        init.f[i] = std::exp(-0.5 * K * init.x[i] * init.x[i] / theta0);
    }
    std::vector<double> touts{0.0, 5.0, 10.0};
    EulerResult er = euler_solve(init, m, K, 0.005, touts, Boundary::Reflecting);
    if (er.halted) return report(8, false, "solver halted: " + er.halt_reason);
    double drift = 0.0;
    for (std::size_t ti = 0; ti < touts.size(); ++ti) {
        for (std::size_t i = 0; i < nx; ++i) {
            drift = std::max(drift, std::abs(er.states[ti].f[i] - init.f[i]));
            drift = std::max(drift, std::abs(er.states[ti].v[i]));
            drift = std::max(drift, std::abs(er.states[ti].theta[i] - theta0));
        }
    }
    return report(8, drift <= 1e-8, fmt("Linf residual drift %.3e (<= 1e-8)", drift));
}

// 9. Gaussian-identity oracle: formula variances vs Monte Carlo (N = 8
//    sites, 1e6 samples, 5 k-points, 3 batch standard errors).
bool criterion_9() {
    ChainParams par;
    par.n_particles = 8;
    par.mass = 1.0;
    par.coupling = 1.0;
    par.binding = 2.0;
    par.spacing = 1.3;
    const long n = 8;
    std::vector<double> qb(n), pb(n), dq2(n), dp2(n), sqp(n, 0.1);
    for (long i = 0; i < n; ++i) {
        qb[i] = par.site_origin(i) + 0.12 * std::sin(1.7 * static_cast<double>(i));
        pb[i] = 0.4 + 0.05 * std::cos(0.9 * static_cast<double>(i));
        dq2[i] = 0.5 + 0.03 * static_cast<double>(i);
        dp2[i] = 0.8 + 0.02 * static_cast<double>(i);
    }
    GaussianChainState st0 = GaussianChainState::product_state(par, qb, pb, dq2, dp2, sqp);
    std::vector<double> ts{1.3};
    Propagator pr = make_propagator(par, PropagatorKind::FiniteDft, ts);
    GaussianChainState st = evolve_state(st0, pr, 0);

    const std::size_t two_n = 16;
    std::vector<double> cov(two_n * two_n), mean(two_n);
    for (long a = 0; a < n; ++a) {
        mean[static_cast<std::size_t>(a)] = st.mean_q(a);
        mean[static_cast<std::size_t>(n + a)] = st.mean_p(a);
        for (long b = 0; b < n; ++b) {
            cov[a * two_n + b] = st.sigma_qq(a, b);
            cov[a * two_n + (n + b)] = st.sigma_qp(a, b);
            cov[(n + a) * two_n + b] = st.sigma_qp(b, a);
            cov[(n + a) * two_n + (n + b)] = st.sigma_pp(a, b);
        }
    }
    std::vector<double> chol = oracle::cholesky(cov, two_n);

    const std::size_t samples = 1000000;
    const std::size_t batches = 20;
    const std::size_t per_batch = samples / batches;
    std::vector<double> ks{0.2, 0.45, 0.8, 1.3, 2.1};

    DensityStats dn = number_density_stats(st, ks);
    DensityStats dg = momentum_density_stats(st, ks);

    std::mt19937_64 rng(20260809);
    std::vector<double> z;
    double worst_z = 0.0;
    std::vector<std::vector<double>> bn(ks.size()), bg(ks.size());
    for (std::size_t b = 0; b < batches; ++b) {
        std::vector<std::complex<double>> sn(ks.size(), {0, 0}), sg(ks.size(), {0, 0});
        std::vector<double> sn2(ks.size(), 0.0), sg2(ks.size(), 0.0);
        for (std::size_t s = 0; s < per_batch; ++s) {
            oracle::sample_gaussian(chol, two_n, mean, rng, z);
            for (std::size_t ki = 0; ki < ks.size(); ++ki) {
                std::complex<double> nk(0, 0), gk(0, 0);
                for (long j = 0; j < n; ++j) {
                    std::complex<double> ph =
                        std::exp(std::complex<double>(0.0, ks[ki] * z[static_cast<std::size_t>(j)]));
                    nk += ph;
                    gk += z[static_cast<std::size_t>(n + j)] * ph;
                }
                sn[ki] += nk;
                sg[ki] += gk;
                sn2[ki] += std::norm(nk);
                sg2[ki] += std::norm(gk);
            }
        }
        double inv = 1.0 / static_cast<double>(per_batch);
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            bn[ki].push_back(sn2[ki] * inv - std::norm(sn[ki] * inv));
            bg[ki].push_back(sg2[ki] * inv - std::norm(sg[ki] * inv));
        }
    }
    auto zscore = [&](const std::vector<double>& batch_vals, double formula) {
        double m1 = 0.0;
        for (double v : batch_vals) m1 += v;
        m1 /= static_cast<double>(batch_vals.size());
        double s2 = 0.0;
        for (double v : batch_vals) s2 += (v - m1) * (v - m1);
        s2 /= static_cast<double>(batch_vals.size() - 1);
        double se = std::sqrt(s2 / static_cast<double>(batch_vals.size()));
        return std::abs(m1 - formula) / se;
    };
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        worst_z = std::max(worst_z, zscore(bn[ki], dn.variance[ki]));
        worst_z = std::max(worst_z, zscore(bg[ki], dg.variance[ki]));
    }
    return report(9, worst_z < 3.0,
                  fmt("max |formula - MC| = %.2f batch standard errors over 5 k-points "
                      "x {n(k), g(k)} (< 3)",
                      worst_z));
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
    }
    bool (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                            criterion_6, criterion_7, criterion_8, criterion_9};
    int failures = 0;
    for (int id = 1; id <= 9; ++id) {
        if (only != 0 && only != id) continue;
        if (!criteria[id - 1]()) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
