#include "oscchain/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oscchain/specfun.hpp"

namespace oscchain {

namespace {
constexpr double kZeroModeTol = 1e-12;
constexpr double kTailTol = 1e-12;
}  // namespace

double ChainParams::omega() const { return std::sqrt(coupling / mass); }

double ChainParams::big_omega() const { return std::sqrt((binding + 2.0 * coupling) / mass); }

double ChainParams::gamma() const {
    double o = omega(), O = big_omega();
    return (o / O) * (o / O);
}

void ChainParams::validate() const {
    if (n_particles < 0) throw std::invalid_argument("chain.particles: must be >= 0 (0 = infinite)");
    if (!(mass > 0.0)) throw std::invalid_argument("chain.mass: must be > 0");
    if (!(coupling >= 0.0)) throw std::invalid_argument("chain.coupling: must be >= 0");
    if (!(binding >= 0.0)) throw std::invalid_argument("chain.binding: must be >= 0");
    if (!(spacing >= 0.0)) throw std::invalid_argument("chain.spacing: must be >= 0");
    if (!(hbar > 0.0)) throw std::invalid_argument("chain.hbar: must be > 0");
    if (coupling == 0.0 && binding == 0.0)
        throw std::invalid_argument("chain: coupling and binding cannot both vanish");
}

std::string to_string(PropagatorKind kind) {
    switch (kind) {
        case PropagatorKind::FiniteDft: return "finite-dft";
        case PropagatorKind::InfiniteSimple: return "infinite-simple";
        case PropagatorKind::InfiniteBound: return "infinite-bound";
    }
    return "?";
}

NormalModeSpectrum normal_mode_frequencies(const ChainParams& params) {
    params.validate();
    if (params.infinite())
        throw std::invalid_argument("normal_mode_frequencies: infinite chain has no discrete spectrum");
    const long n = params.n_particles;
    NormalModeSpectrum s;
    s.frequencies.resize(static_cast<std::size_t>(n));
    for (long alpha = 1; alpha <= n; ++alpha) {
        double sn = std::sin(std::numbers::pi * static_cast<double>(alpha) / static_cast<double>(n));
        double w = std::sqrt(params.binding / params.mass +
                             4.0 * params.coupling / params.mass * sn * sn);
        s.frequencies[static_cast<std::size_t>(alpha - 1)] = w;
        if (w < kZeroModeTol * std::max(1.0, params.big_omega())) s.zero_modes.push_back(alpha);
    }
    return s;
}

std::size_t Propagator::slot(long offset) const {
    if (kind == PropagatorKind::FiniteDft) {
        const long n = params.n_particles;
        long r = offset % n;
        if (r < 0) r += n;
        return static_cast<std::size_t>(r);
    }
    return static_cast<std::size_t>(offset + window_radius);
}

double Propagator::f_at(std::size_t ti, long offset) const {
    if (kind != PropagatorKind::FiniteDft && std::labs(offset) > window_radius) return 0.0;
    return f[ti][slot(offset)];
}
double Propagator::g_at(std::size_t ti, long offset) const {
    if (kind != PropagatorKind::FiniteDft && std::labs(offset) > window_radius) return 0.0;
    return g[ti][slot(offset)];
}
double Propagator::fdot_at(std::size_t ti, long offset) const {
    if (kind != PropagatorKind::FiniteDft && std::labs(offset) > window_radius) return 0.0;
    return fdot[ti][slot(offset)];
}
double Propagator::gdot_at(std::size_t ti, long offset) const {
    if (kind != PropagatorKind::FiniteDft && std::labs(offset) > window_radius) return 0.0;
    return gdot[ti][slot(offset)];
}

namespace {

// Finite chain, period-N tables by direct mode sums. Zero modes enter the
// g-sum through the analytic limit sin(omega t)/omega -> t, which keeps the
// centre-of-mass motion and the conservation laws exact.
void fill_finite(Propagator& prop) {
    const ChainParams& par = prop.params;
    const long n = par.n_particles;
    const double Om = par.big_omega();
    NormalModeSpectrum spec = normal_mode_frequencies(par);

    const double two_pi_over_n = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t ti = 0; ti < prop.times.size(); ++ti) {
        const double t = prop.times[ti];
        auto& frow = prop.f[ti];
        auto& grow = prop.g[ti];
        auto& fdrow = prop.fdot[ti];
        auto& gdrow = prop.gdot[ti];
        for (long j = 0; j < n; ++j) {
            double sf = 0.0, sg = 0.0, sfd = 0.0, sgd = 0.0;
            for (long alpha = 1; alpha <= n; ++alpha) {
                double w = spec.frequencies[static_cast<std::size_t>(alpha - 1)];
                double cphase = std::cos(two_pi_over_n * static_cast<double>(alpha * j % n));
                double cw = std::cos(w * t), sw = std::sin(w * t);
                bool zero = (w < kZeroModeTol * std::max(1.0, Om));
                sf += cphase * cw;
                sg += cphase * (zero ? t : sw / w);
                sfd += cphase * (zero ? 0.0 : -w * sw);
                sgd += cphase * cw;
            }
            double inv_n = 1.0 / static_cast<double>(n);
            frow[static_cast<std::size_t>(j)] = sf * inv_n;
            grow[static_cast<std::size_t>(j)] = Om * sg * inv_n;
            fdrow[static_cast<std::size_t>(j)] = sfd * inv_n;
            gdrow[static_cast<std::size_t>(j)] = Om * sgd * inv_n;
        }
    }
}

// Infinite simple chain: f_r = J_{2r}(2 w t), g_r = Omega int_0^t J_{2r}(2 w t')dt'.
void fill_infinite_simple(Propagator& prop) {
    const ChainParams& par = prop.params;
    const double om = par.omega();
    const double Om = par.big_omega();
    const long R = prop.window_radius;
    for (std::size_t ti = 0; ti < prop.times.size(); ++ti) {
        const double x = 2.0 * om * prop.times[ti];
        auto jrow = specfun::bessel_j_row(static_cast<int>(2 * R + 2), x);
        auto irow = specfun::bessel_j_integral_row(static_cast<int>(2 * R), x);
        for (long r = -R; r <= R; ++r) {
            std::size_t s = static_cast<std::size_t>(r + R);
            long a = std::labs(2 * r);
            double j2r = jrow[static_cast<std::size_t>(a)];
            // J_{2r-1}, J_{2r+1} with parity J_{-n} = (-1)^n J_n
            long am = std::labs(2 * r - 1), ap = std::labs(2 * r + 1);
            double jm = jrow[static_cast<std::size_t>(am)] * ((2 * r - 1 < 0 && am % 2 == 1) ? -1.0 : 1.0);
            double jp = jrow[static_cast<std::size_t>(ap)] * ((2 * r + 1 < 0 && ap % 2 == 1) ? -1.0 : 1.0);
            prop.f[ti][s] = j2r;
            prop.fdot[ti][s] = om * (jm - jp);
            prop.g[ti][s] = (x > 0.0) ? Om / (2.0 * om) * irow[static_cast<std::size_t>(a)] : 0.0;
            prop.gdot[ti][s] = Om * j2r;
        }
        if (std::abs(prop.f[ti][0]) > kTailTol || std::abs(prop.f[ti].back()) > kTailTol)
            prop.truncated = true;
    }
}

// Infinite bound chain (gamma << 1): f_r = J_r(g W t) cos(W t - pi r/2),
// g_r = J_r(g W t) sin(W t - pi r/2).
void fill_infinite_bound(Propagator& prop) {
    const ChainParams& par = prop.params;
    const double Om = par.big_omega();
    const double ga = par.gamma();
    const long R = prop.window_radius;
    for (std::size_t ti = 0; ti < prop.times.size(); ++ti) {
        const double t = prop.times[ti];
        const double x = ga * Om * t;
        auto jrow = specfun::bessel_j_row(static_cast<int>(R + 1), x);
        auto jval = [&](long n) {
            long a = std::labs(n);
            double v = jrow[static_cast<std::size_t>(a)];
            return (n < 0 && a % 2 == 1) ? -v : v;
        };
        for (long r = -R; r <= R; ++r) {
            std::size_t s = static_cast<std::size_t>(r + R);
            double ph = Om * t - 0.5 * std::numbers::pi * static_cast<double>(r);
            double c = std::cos(ph), sn = std::sin(ph);
            double jr = jval(r);
            double jprime = 0.5 * (jval(r - 1) - jval(r + 1));
            prop.f[ti][s] = jr * c;
            prop.g[ti][s] = jr * sn;
            prop.fdot[ti][s] = ga * Om * jprime * c - Om * jr * sn;
            prop.gdot[ti][s] = ga * Om * jprime * sn + Om * jr * c;
        }
        if (std::abs(prop.f[ti][0]) > kTailTol || std::abs(prop.f[ti].back()) > kTailTol)
            prop.truncated = true;
    }
}

long auto_radius(const ChainParams& par, PropagatorKind kind, double t_max) {
    // Bessel support: |J_n(x)| < 1e-12 once n > x + ~9.5 x^(1/3) + const.
    auto support = [](double x) {
        return static_cast<long>(std::ceil(x + 10.0 * std::cbrt(std::max(x, 1.0)) + 16.0));
    };
    if (kind == PropagatorKind::InfiniteSimple) {
        double x = 2.0 * par.omega() * t_max;
        return (support(x) + 1) / 2 + 1;  // order 2R
    }
    double x = par.gamma() * par.big_omega() * t_max;
    return support(x);
}

}  // namespace

Propagator make_propagator(const ChainParams& params, PropagatorKind kind,
                           std::span<const double> t_grid, long window_radius) {
    params.validate();
    for (double t : t_grid)
        if (!(t >= 0.0) || !std::isfinite(t))
            throw std::invalid_argument("propagator: times must be finite and >= 0");

    Propagator prop;
    prop.kind = kind;
    prop.params = params;
    prop.times.assign(t_grid.begin(), t_grid.end());
    double t_max = prop.times.empty() ? 0.0 : *std::max_element(prop.times.begin(), prop.times.end());

    std::size_t width = 0;
    switch (kind) {
        case PropagatorKind::FiniteDft:
            if (params.infinite() || params.n_particles < 2)
                throw std::invalid_argument("propagator: finite-dft requires N >= 2");
            width = static_cast<std::size_t>(params.n_particles);
            break;
        case PropagatorKind::InfiniteSimple:
            if (!params.infinite())
                throw std::invalid_argument("propagator: infinite-simple requires an infinite chain");
            if (params.binding != 0.0)
                throw std::invalid_argument("propagator: infinite-simple requires K = 0");
            prop.window_radius = window_radius >= 0 ? window_radius : auto_radius(params, kind, t_max);
            width = static_cast<std::size_t>(2 * prop.window_radius + 1);
            break;
        case PropagatorKind::InfiniteBound:
            if (!params.infinite())
                throw std::invalid_argument("propagator: infinite-bound requires an infinite chain");
            if (!params.bound_bessel_valid())
                throw std::invalid_argument(
                    "propagator: infinite-bound requires K > 0 with gamma = (omega/Omega)^2 < 0.1");
            prop.window_radius = window_radius >= 0 ? window_radius : auto_radius(params, kind, t_max);
            width = static_cast<std::size_t>(2 * prop.window_radius + 1);
            break;
    }

    const std::size_t nt = prop.times.size();
    prop.f.assign(nt, std::vector<double>(width, 0.0));
    prop.g.assign(nt, std::vector<double>(width, 0.0));
    prop.fdot.assign(nt, std::vector<double>(width, 0.0));
    prop.gdot.assign(nt, std::vector<double>(width, 0.0));

    switch (kind) {
        case PropagatorKind::FiniteDft: fill_finite(prop); break;
        case PropagatorKind::InfiniteSimple: fill_infinite_simple(prop); break;
        case PropagatorKind::InfiniteBound: fill_infinite_bound(prop); break;
    }
    return prop;
}

Means evolve_means(const Propagator& prop, std::size_t time_index,
                   std::span<const double> q0, std::span<const double> p0,
                   long window_lo) {
    if (q0.size() != p0.size()) throw std::invalid_argument("evolve_means: q0/p0 size mismatch");
    if (time_index >= prop.n_times()) throw std::invalid_argument("evolve_means: bad time index");
    const ChainParams& par = prop.params;
    const long size = static_cast<long>(q0.size());
    if (prop.kind == PropagatorKind::FiniteDft && size != par.n_particles)
        throw std::invalid_argument("evolve_means: array size must equal N");

    const double m_om = par.mass * par.big_omega();
    Means out;
    out.q.resize(q0.size());
    out.p.resize(p0.size());

    // displacement / momentum with edge continuation for infinite windows
    auto uq = [&](long r) -> double {
        long i = std::clamp(r - window_lo, 0L, size - 1);
        long site = prop.kind == PropagatorKind::FiniteDft ? r : window_lo + i;
        // outside the window the displacement field is continued flat
        return q0[static_cast<std::size_t>(i)] - par.site_origin(site);
    };
    auto up = [&](long r) -> double {
        long i = std::clamp(r - window_lo, 0L, size - 1);
        return p0[static_cast<std::size_t>(i)];
    };

    const long reach = prop.kind == PropagatorKind::FiniteDft ? 0 : prop.window_radius;
    for (long i = 0; i < size; ++i) {
        const long n = window_lo + i;
        double q_acc = 0.0, p_acc = 0.0;
        if (prop.kind == PropagatorKind::FiniteDft) {
            for (long r = 0; r < size; ++r) {
                double fv = prop.f_at(time_index, r - n);
                double gv = prop.g_at(time_index, r - n);
                double fd = prop.fdot_at(time_index, r - n);
                double gd = prop.gdot_at(time_index, r - n);
                q_acc += fv * uq(r) + gv * up(r) / m_om;
                p_acc += par.mass * fd * uq(r) + gd * up(r) / par.big_omega();
            }
        } else {
            for (long r = n - reach; r <= n + reach; ++r) {
                double fv = prop.f_at(time_index, r - n);
                double gv = prop.g_at(time_index, r - n);
                double fd = prop.fdot_at(time_index, r - n);
                double gd = prop.gdot_at(time_index, r - n);
                q_acc += fv * uq(r) + gv * up(r) / m_om;
                p_acc += par.mass * fd * uq(r) + gd * up(r) / par.big_omega();
            }
        }
        out.q[static_cast<std::size_t>(i)] = par.site_origin(n) + q_acc;
        out.p[static_cast<std::size_t>(i)] = p_acc;
    }
    return out;
}

double mean_field_energy(const ChainParams& par, std::span<const double> q,
                         std::span<const double> p, long window_lo) {
    // Written in displacements u_n = q_n - b_n with the periodic closure the
    // normal-mode solution uses; for b = 0 this is the literal Hamiltonian.
    const long size = static_cast<long>(q.size());
    auto u = [&](long i) {
        return q[static_cast<std::size_t>(i)] - par.site_origin(window_lo + i);
    };
    double e = 0.0;
    for (long i = 0; i < size; ++i) {
        double ui = u(i);
        e += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)] / (2.0 * par.mass);
        e += 0.5 * par.binding * ui * ui;
        double um1;
        if (i > 0) {
            um1 = u(i - 1);
        } else if (!par.infinite() && size == par.n_particles) {
            um1 = u(size - 1);  // wrap
        } else {
            um1 = ui;  // flat continuation at a window edge
        }
        double d = ui - um1;
        e += 0.5 * par.coupling * d * d;
    }
    return e;
}

}  // namespace oscchain
