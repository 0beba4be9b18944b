#include "oscchain/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oscchain {

namespace {
const double kNan = std::numeric_limits<double>::quiet_NaN();

double gauss_kernel(double x, double w) {
    return std::exp(-0.5 * x * x / (w * w)) / (w * std::sqrt(2.0 * std::numbers::pi));
}

// first derivative, 2nd order: centered inside, 3-point one-sided at open
// edges (exact for quadratics, which keeps the harmonic static solution of
// the Euler system an exact fixed point of the discretisation)
std::vector<double> d1(const std::vector<double>& u, double dx, Boundary bc) {
    const std::size_t n = u.size();
    std::vector<double> out(n);
    const double i2 = 1.0 / (2.0 * dx);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i + 1] - u[i - 1]) * i2;
    if (bc == Boundary::Periodic) {
        out[0] = (u[1] - u[n - 1]) * i2;
        out[n - 1] = (u[0] - u[n - 2]) * i2;
    } else {
        out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) * i2;
        out[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * i2;
    }
    return out;
}

// upwind first derivative against velocity sign (first order)
std::vector<double> d1_upwind(const std::vector<double>& u, const std::vector<double>& v,
                              double dx, Boundary bc) {
    const std::size_t n = u.size();
    std::vector<double> out(n);
    auto at = [&](long i) -> double {
        if (i >= 0 && i < static_cast<long>(n)) return u[static_cast<std::size_t>(i)];
        if (bc == Boundary::Periodic) return u[static_cast<std::size_t>((i % static_cast<long>(n) + n) % n)];
        return u[static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1))];
    };
    for (long i = 0; i < static_cast<long>(n); ++i) {
        if (v[static_cast<std::size_t>(i)] >= 0.0)
            out[static_cast<std::size_t>(i)] = (at(i) - at(i - 1)) / dx;
        else
            out[static_cast<std::size_t>(i)] = (at(i + 1) - at(i)) / dx;
    }
    return out;
}

std::size_t steps_to(double t, double dt) {
    double s = t / dt;
    double r = std::round(s);
    if (std::abs(s - r) > 1e-6 * std::max(1.0, std::abs(s)))
        throw std::invalid_argument("output times must be integer multiples of dt");
    return static_cast<std::size_t>(r);
}

}  // namespace

HydroFields extract_fields(const GaussianChainState& st, std::span<const double> grid,
                           double smear_width, double n_floor) {
    const ChainParams& par = st.params();
    if (!(smear_width > 0.0)) throw std::invalid_argument("extract_fields: smearing width must be > 0");
    HydroFields out;
    out.x.assign(grid.begin(), grid.end());
    const std::size_t ng = grid.size();
    out.n.assign(ng, 0.0);
    out.n0.assign(ng, 0.0);
    out.n1.assign(ng, 0.0);
    out.v.assign(ng, kNan);
    out.theta.assign(ng, kNan);
    out.f.assign(ng, 0.0);
    out.masked.assign(ng, 0);

    const long lo = st.site_begin(), hi = st.site_end();
    const double count = static_cast<double>(hi - lo);
    if (n_floor < 0.0) n_floor = 1e-8 / smear_width;  // ~1e-8 of one particle's peak

    std::vector<double> g(ng, 0.0), dp2k(ng, 0.0);
    const double cutoff = 8.0 * smear_width;
    // finite lattice chains are rings: sites contribute through their
    // periodic images as well
    const bool ring = !par.infinite() && par.spacing > 0.0;
    const double ring_len = ring ? par.spacing * static_cast<double>(par.n_particles) : 0.0;
    const int img_max = ring ? 1 : 0;
    for (long j = lo; j < hi; ++j) {
        double pj = st.mean_p(j), dp2 = st.sigma_pp(j, j);
        for (int img = -img_max; img <= img_max; ++img) {
            double qj = st.mean_q(j) + ring_len * img;
            double bj = par.site_origin(j) + ring_len * img;
            for (std::size_t i = 0; i < ng; ++i) {
                if (std::abs(grid[i] - qj) < cutoff) {
                    double kw = gauss_kernel(grid[i] - qj, smear_width);
                    out.n[i] += kw;
                    g[i] += pj * kw;
                    dp2k[i] += dp2 * kw;
                }
                if (std::abs(grid[i] - bj) < cutoff)
                    out.n0[i] += gauss_kernel(grid[i] - bj, smear_width);
            }
        }
    }
    for (std::size_t i = 0; i < ng; ++i) {
        out.n1[i] = out.n[i] - out.n0[i];
        out.f[i] = out.n[i] / count;
        if (out.n[i] > n_floor) {
            out.v[i] = g[i] / (par.mass * out.n[i]);
            out.theta[i] = dp2k[i] / (par.mass * out.n[i]);
        } else {
            out.masked[i] = 1;
        }
    }
    return out;
}

WaveResult wave_solve(std::span<const double> n1_0, std::span<const double> dn1dt_0,
                      double c, double dx, double dt, std::span<const double> t_out,
                      Boundary bc) {
    const std::size_t n = n1_0.size();
    if (n < 3 || dn1dt_0.size() != n) throw std::invalid_argument("wave_solve: bad field sizes");
    const double cfl = c * dt / dx;
    if (cfl > 1.0 + 1e-12)
        throw std::invalid_argument("wave_solve: CFL violation, c*dt/dx = " + std::to_string(cfl));

    std::vector<std::size_t> out_steps;
    std::size_t max_step = 0;
    for (double t : t_out) {
        out_steps.push_back(steps_to(t, dt));
        max_step = std::max(max_step, out_steps.back());
    }

    auto lap = [&](const std::vector<double>& u, std::size_t i) -> double {
        double um, up;
        if (i == 0)
            um = (bc == Boundary::Periodic) ? u[n - 1] : u[1];
        else
            um = u[i - 1];
        if (i == n - 1)
            up = (bc == Boundary::Periodic) ? u[0] : u[n - 2];
        else
            up = u[i + 1];
        return up - 2.0 * u[i] + um;
    };

    const double c2 = cfl * cfl;
    std::vector<double> prev(n1_0.begin(), n1_0.end());
    std::vector<double> cur(n), next(n);
    // first step from the Taylor expansion (keeps second-order accuracy)
    for (std::size_t i = 0; i < n; ++i)
        cur[i] = prev[i] + dt * dn1dt_0[i] + 0.5 * c2 * lap(prev, i);

    WaveResult res;
    res.times.assign(t_out.begin(), t_out.end());
    res.n1.resize(t_out.size());
    auto record = [&](std::size_t step, const std::vector<double>& u) {
        for (std::size_t oi = 0; oi < out_steps.size(); ++oi)
            if (out_steps[oi] == step) res.n1[oi] = u;
    };
    record(0, prev);
    record(1, cur);
    for (std::size_t step = 2; step <= max_step; ++step) {
        for (std::size_t i = 0; i < n; ++i)
            next[i] = 2.0 * cur[i] - prev[i] + c2 * lap(cur, i);
        prev.swap(cur);
        cur.swap(next);
        record(step, cur);
    }
    return res;
}

namespace {

struct EulerRhs {
    std::vector<double> f, v, th;
};

EulerRhs euler_rhs(const EulerFields& s, double mass, double binding, double dx,
                   Boundary bc, bool upwind, double dt) {
    const std::size_t n = s.f.size();
    EulerRhs r;
    r.f.resize(n);
    r.v.resize(n);
    r.th.resize(n);

    std::vector<double> fv(n), lnf(n);
    for (std::size_t i = 0; i < n; ++i) {
        fv[i] = s.f[i] * s.v[i];
        lnf[i] = std::log(s.f[i]);
    }
    std::vector<double> d_fv = d1(fv, dx, bc);
    std::vector<double> d_lnf = d1(lnf, dx, bc);
    std::vector<double> d_th = d1(s.theta, dx, bc);
    std::vector<double> d_v = d1(s.v, dx, bc);
    std::vector<double> adv_v = upwind ? d1_upwind(s.v, s.v, dx, bc) : d_v;
    std::vector<double> adv_th = upwind ? d1_upwind(s.theta, s.v, dx, bc) : d_th;

    for (std::size_t i = 0; i < n; ++i) {
        r.f[i] = -d_fv[i];
        r.v[i] = -s.v[i] * adv_v[i] - d_th[i] / mass - s.theta[i] / mass * d_lnf[i] -
                 binding * s.x[i] / mass;
        r.th[i] = -s.v[i] * adv_th[i] - 2.0 * s.theta[i] * d_v[i];
    }
    (void)dt;
    return r;
}

bool euler_fields_bad(const EulerFields& s) {
    for (double x : s.f)
        if (!(x > 0.0) || !std::isfinite(x)) return true;
    for (double x : s.theta)
        if (!(x > 0.0) || !std::isfinite(x)) return true;
    for (double x : s.v)
        if (!std::isfinite(x)) return true;
    return false;
}

}  // namespace

EulerResult euler_solve(const EulerFields& init, double mass, double binding,
                        double dt, std::span<const double> t_out, Boundary bc) {
    const std::size_t n = init.f.size();
    if (n < 4 || init.v.size() != n || init.theta.size() != n || init.x.size() != n)
        throw std::invalid_argument("euler_solve: bad field sizes");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(init.x[i + 1] > init.x[i])) throw std::invalid_argument("euler_solve: grid not increasing");
    if (euler_fields_bad(init)) throw std::invalid_argument("euler_solve: f and theta must be > 0");
    const double dx = init.x[1] - init.x[0];

    std::vector<std::size_t> out_steps;
    std::size_t max_step = 0;
    for (double t : t_out) {
        out_steps.push_back(steps_to(t, dt));
        max_step = std::max(max_step, out_steps.back());
    }

    EulerResult res;
    res.times.assign(t_out.begin(), t_out.end());
    res.states.resize(t_out.size());

    EulerFields s = init;
    auto record = [&](std::size_t step) {
        for (std::size_t oi = 0; oi < out_steps.size(); ++oi)
            if (out_steps[oi] == step) res.states[oi] = s;
    };
    record(0);

    auto axpy = [&](const EulerFields& base, const EulerRhs& k, double a) {
        EulerFields o = base;
        for (std::size_t i = 0; i < n; ++i) {
            o.f[i] += a * k.f[i];
            o.v[i] += a * k.v[i];
            o.theta[i] += a * k.th[i];
        }
        return o;
    };

    for (std::size_t step = 1; step <= max_step; ++step) {
        double vmax = 0.0;
        for (double v : s.v) vmax = std::max(vmax, std::abs(v));
        bool upwind = vmax * dt / dx > 0.3;

        EulerRhs k1 = euler_rhs(s, mass, binding, dx, bc, upwind, dt);
        EulerFields s2 = axpy(s, k1, 0.5 * dt);
        if (euler_fields_bad(s2)) {
            res.halted = true;
            res.halt_reason = "f or theta left the positive domain";
            res.halt_time = (static_cast<double>(step) - 0.5) * dt;
            res.halt_state = s;
            return res;
        }
        EulerRhs k2 = euler_rhs(s2, mass, binding, dx, bc, upwind, dt);
        EulerFields s3 = axpy(s, k2, 0.5 * dt);
        EulerRhs k3 = euler_rhs(s3, mass, binding, dx, bc, upwind, dt);
        EulerFields s4 = axpy(s, k3, dt);
        EulerRhs k4 = euler_rhs(s4, mass, binding, dx, bc, upwind, dt);
        for (std::size_t i = 0; i < n; ++i) {
            s.f[i] += dt / 6.0 * (k1.f[i] + 2.0 * k2.f[i] + 2.0 * k3.f[i] + k4.f[i]);
            s.v[i] += dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
            s.theta[i] += dt / 6.0 * (k1.th[i] + 2.0 * k2.th[i] + 2.0 * k3.th[i] + k4.th[i]);
        }
        if (euler_fields_bad(s)) {
            res.halted = true;
            res.halt_reason = "f or theta left the positive domain";
            res.halt_time = static_cast<double>(step) * dt;
            res.halt_state = s;
            return res;
        }
        record(step);
    }
    return res;
}

CompareResult compare_micro_hydro(const MicroHydroScenario& sc, std::span<const double> t_out) {
    const ChainParams& par = sc.chain;
    par.validate();
    if (par.infinite() || par.binding != 0.0)
        throw std::invalid_argument("compare_micro_hydro: needs a finite K = 0 chain");
    const long N = par.n_particles;
    const double d = par.spacing;
    if (!(d > 0.0)) throw std::invalid_argument("compare_micro_hydro: needs spacing > 0");

    CompareResult out;
    out.model_speed = d * std::sqrt(par.coupling / par.mass);

    // long-wavelength preconditions: k^-1 >> d and k^-2 >> dq2
    double k_char = 0.0;
    if (sc.profile.shape == DisplacementProfile::Shape::Sine && sc.profile.wavelength > 0.0)
        k_char = 2.0 * std::numbers::pi / sc.profile.wavelength;
    else if (sc.profile.shape == DisplacementProfile::Shape::GaussKink && sc.profile.width > 0.0)
        k_char = 1.0 / sc.profile.width;
    if (k_char * d > 0.25 || k_char * k_char * sc.dq2 > 0.01) out.precondition_warning = true;

    // initial means: displacement profile on top of the lattice
    std::vector<double> q0(static_cast<std::size_t>(N)), p0(static_cast<std::size_t>(N), 0.0);
    for (long j = 0; j < N; ++j) {
        double dq = 0.0;
        double xj = d * static_cast<double>(j);
        switch (sc.profile.shape) {
            case DisplacementProfile::Shape::None: break;
            case DisplacementProfile::Shape::Sine:
                dq = sc.profile.amplitude * d *
                     std::sin(2.0 * std::numbers::pi * xj / sc.profile.wavelength);
                break;
            case DisplacementProfile::Shape::GaussKink: {
                // displacement kink whose negative divergence is a Gaussian
                // density pulse of amplitude `amplitude` (particles per length)
                double s = sc.profile.width;
                double xc = sc.profile.center * d;
                double z = (xj - xc) / (s * std::sqrt(2.0));
                dq = -sc.profile.amplitude * d * s * std::sqrt(0.5 * std::numbers::pi) *
                     (1.0 + std::erf(z));
                break;
            }
        }
        q0[static_cast<std::size_t>(j)] = xj + dq;
    }

    GaussianChainState state = GaussianChainState::product_state(
        par, q0, p0, std::vector<double>(static_cast<std::size_t>(N), sc.dq2),
        std::vector<double>(static_cast<std::size_t>(N), sc.dp2),
        std::vector<double>(static_cast<std::size_t>(N), 0.0));

    // periodic field grid commensurate with the ring length L = N d, so the
    // PDE wrap matches the chain's own periodicity
    const double ring_len = d * static_cast<double>(N);
    const std::size_t ng = static_cast<std::size_t>(std::lround(ring_len / sc.grid_dx));
    const double dx = ring_len / static_cast<double>(ng);
    out.grid.resize(ng);
    for (std::size_t i = 0; i < ng; ++i) out.grid[i] = dx * static_cast<double>(i);

    Propagator prop = make_propagator(par, PropagatorKind::FiniteDft, t_out);

    out.times.assign(t_out.begin(), t_out.end());
    for (std::size_t ti = 0; ti < t_out.size(); ++ti) {
        Means mv = evolve_means(prop, ti, q0, p0);
        GaussianChainState snap = GaussianChainState::product_state(
            par, mv.q, mv.p, std::vector<double>(static_cast<std::size_t>(N), sc.dq2),
            std::vector<double>(static_cast<std::size_t>(N), sc.dp2),
            std::vector<double>(static_cast<std::size_t>(N), 0.0));
        out.micro.push_back(extract_fields(snap, out.grid, sc.smear_width));
    }

    // PDE side: same initial n1; dn1/dt(0) = -(1/m) dg/dx = 0 for p(0) = 0
    const HydroFields& f0 = out.micro.front();
    std::vector<double> zero(ng, 0.0);
    double dt = sc.pde_cfl * dx / out.model_speed;
    // land exactly on the requested output times
    double t_max = *std::max_element(t_out.begin(), t_out.end());
    if (t_max > 0.0) {
        double base = t_out.size() > 1 ? t_out[1] - t_out[0] : t_max;
        std::size_t sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(base / dt)));
        dt = base / static_cast<double>(sub);
    }
    WaveResult wr = wave_solve(f0.n1, zero, out.model_speed, dx, dt, t_out,
                               Boundary::Periodic);
    out.pde_n1 = std::move(wr.n1);

    for (std::size_t ti = 0; ti < t_out.size(); ++ti) {
        double num2 = 0.0, den2 = 0.0, ninf = 0.0, dinf = 0.0;
        for (std::size_t i = 0; i < ng; ++i) {
            double a = out.micro[ti].n1[i], b = out.pde_n1[ti][i];
            num2 += (a - b) * (a - b);
            den2 += a * a;
            ninf = std::max(ninf, std::abs(a - b));
            dinf = std::max(dinf, std::abs(a));
        }
        out.l2_rel.push_back(den2 > 0.0 ? std::sqrt(num2 / den2) : 0.0);
        out.linf_rel.push_back(dinf > 0.0 ? ninf / dinf : 0.0);
    }

    // measured propagation speed
    if (sc.profile.shape == DisplacementProfile::Shape::GaussKink) {
        // centroid of the right-moving lobe, linear fit over the later times
        std::vector<double> tt, xx;
        double xc0 = sc.profile.center * d;
        for (std::size_t ti = 0; ti < t_out.size(); ++ti) {
            if (t_out[ti] * out.model_speed < 4.0 * sc.profile.width) continue;  // lobes not yet split
            double wsum = 0.0, xsum = 0.0;
            for (std::size_t i = 0; i < ng; ++i) {
                if (out.grid[i] > xc0 + 2.0 * sc.profile.width) {
                    double w = std::max(0.0, out.micro[ti].n1[i]);
                    wsum += w;
                    xsum += w * out.grid[i];
                }
            }
            if (wsum > 0.0) {
                tt.push_back(t_out[ti]);
                xx.push_back(xsum / wsum);
            }
        }
        if (tt.size() >= 2) {
            double tm = 0.0, xm = 0.0;
            for (std::size_t i = 0; i < tt.size(); ++i) {
                tm += tt[i];
                xm += xx[i];
            }
            tm /= static_cast<double>(tt.size());
            xm /= static_cast<double>(tt.size());
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t i = 0; i < tt.size(); ++i) {
                sxy += (tt[i] - tm) * (xx[i] - xm);
                sxx += (tt[i] - tm) * (tt[i] - tm);
            }
            out.measured_speed = sxx > 0.0 ? sxy / sxx : kNan;
        } else {
            out.measured_speed = kNan;
        }
    } else if (sc.profile.shape == DisplacementProfile::Shape::Sine) {
        // standing-wave amplitude A(t) ~ cos(c kappa t): fit the frequency by
        // locating the first zero crossing of the fundamental mode amplitude
        double kappa = 2.0 * std::numbers::pi / sc.profile.wavelength;
        std::vector<double> amp;
        for (std::size_t ti = 0; ti < t_out.size(); ++ti) {
            double a = 0.0;
            for (std::size_t i = 0; i < ng; ++i)
                a += out.micro[ti].n1[i] * std::cos(kappa * out.grid[i]);
            amp.push_back(a);
        }
        out.measured_speed = kNan;
        for (std::size_t ti = 1; ti < amp.size(); ++ti) {
            if (amp[ti - 1] > 0.0 && amp[ti] <= 0.0) {
                double frac = amp[ti - 1] / (amp[ti - 1] - amp[ti]);
                double t_zero = t_out[ti - 1] + frac * (t_out[ti] - t_out[ti - 1]);
                out.measured_speed = 0.5 * std::numbers::pi / (kappa * t_zero);
                break;
            }
            if (amp[ti - 1] < 0.0 && amp[ti] >= 0.0) {
                double frac = amp[ti - 1] / (amp[ti - 1] - amp[ti]);
                double t_zero = t_out[ti - 1] + frac * (t_out[ti] - t_out[ti - 1]);
                out.measured_speed = 0.5 * std::numbers::pi / (kappa * t_zero);
                break;
            }
        }
    } else {
        out.measured_speed = kNan;
    }
    return out;
}

std::vector<EquilibriumMetric> local_equilibrium_metric(
    std::span<const GaussianChainState> trajectory) {
    std::vector<EquilibriumMetric> out;
    out.reserve(trajectory.size());
    for (const GaussianChainState& st : trajectory) {
        EquilibriumMetric m;
        m.time = st.time();
        const long lo = st.site_begin(), hi = st.site_end();
        double sqp_max = 0.0, dp2_min = 1e300, dp2_max = 0.0;
        for (long j = lo; j < hi; ++j) {
            double scale = std::sqrt(st.sigma_qq(j, j) * st.sigma_pp(j, j));
            sqp_max = std::max(sqp_max, std::abs(st.sigma_qp(j, j)) / scale);
            double dp2 = st.sigma_pp(j, j);
            dp2_min = std::min(dp2_min, dp2);
            dp2_max = std::max(dp2_max, dp2);
        }
        m.sqp_rel = sqp_max;
        m.dp2_flatness = dp2_max > 0.0 ? (dp2_max - dp2_min) / dp2_max : 0.0;
        if (st.params().binding > 0.0) {
            // Feeding the current centre widths back through the limit map
            // measures the distance from its fixed point dp2 = (m Omega)^2 dq2,
            // which is where any initial data ends up.
            long c = lo + (hi - lo) / 2;
            EquilibriumLimits lim =
                equilibrium_limits(st.params(), st.sigma_qq(c, c), st.sigma_pp(c, c));
            double dq = std::abs(st.sigma_qq(c, c) - lim.sqq_inf) / lim.sqq_inf;
            double dp = std::abs(st.sigma_pp(c, c) - lim.spp_inf) / lim.spp_inf;
            m.dist_eq = std::max(dq, dp);
        } else {
            m.dist_eq = kNan;
        }
        out.push_back(m);
    }
    return out;
}

double convergence_time(std::span<const EquilibriumMetric> metrics, double tol) {
    for (const EquilibriumMetric& m : metrics) {
        if (m.sqp_rel < tol && m.dp2_flatness < tol && m.dist_eq < tol) return m.time;
    }
    return kNan;
}

}  // namespace oscchain
