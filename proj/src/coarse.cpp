#include "oscchain/coarse.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oscchain/specfun.hpp"

namespace oscchain {

namespace {
const double kNan = std::numeric_limits<double>::quiet_NaN();

double ratio_or_nan(double var, double mean_sq) {
    return mean_sq > 0.0 ? var / mean_sq : kNan;
}
}  // namespace

SubsectionMomentumCoefficients subsection_momentum_coefficients(
    const ChainParams& params, PropagatorKind kind, int block, std::span<const double> t_grid) {
    if (block < 1) throw std::invalid_argument("subsection: block size must be >= 1");
    SubsectionMomentumCoefficients out;
    out.a_full.reserve(t_grid.size());
    out.a_fluct.reserve(t_grid.size());
    out.c_full.reserve(t_grid.size());
    const long M = block;
    for (double t : t_grid) {
        double a_sum = 0.0, c_sum = 0.0;
        for (long d = -(M - 1); d <= M - 1; ++d) {
            double w = static_cast<double>(M - std::labs(d));  // multiplicity of separation d
            CorrelationCoefficients cc = correlation_coefficients(params, kind, d, t);
            a_sum += w * cc.a;
            c_sum += w * cc.c;
        }
        out.a_full.push_back(a_sum);
        out.a_fluct.push_back(a_sum - 0.5 * static_cast<double>(M));
        out.c_full.push_back(c_sum);
    }
    return out;
}

PeakingReport subsection_momentum_stats(const ChainParams& params, PropagatorKind kind,
                                        double dq2, double dp2, double drift_velocity,
                                        int block, std::span<const double> t_grid) {
    SubsectionMomentumCoefficients co = subsection_momentum_coefficients(params, kind, block, t_grid);
    PeakingReport rep;
    rep.label = "subsection_momentum";
    rep.block_size = block;
    rep.extra_label = "a_fluct";
    rep.times.assign(t_grid.begin(), t_grid.end());
    const double pbar = params.mass * drift_velocity;

    // uniform drift: <P_M>(t) = M pbar * sum_r f_r(t); the simple chain has
    // sum_r f_r = 1 exactly, the bound chain oscillates as cos((1-gamma) W t)
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double var = co.c_full[i] * dq2 + co.a_full[i] * dp2;
        double fsum = 1.0;
        if (kind == PropagatorKind::InfiniteBound)
            fsum = std::cos((1.0 - params.gamma()) * params.big_omega() * t_grid[i]);
        double mean = static_cast<double>(block) * pbar * fsum;
        rep.variance.push_back(var);
        rep.squared_mean.push_back(mean * mean);
        rep.ratio.push_back(ratio_or_nan(var, mean * mean));
        rep.extra.push_back(co.a_fluct[i]);
    }
    return rep;
}

PeakingReport subsection_momentum_stats(const GaussianChainState& initial,
                                        const Propagator& prop, int block) {
    if (block < 1) throw std::invalid_argument("subsection: block size must be >= 1");
    if (block > initial.n_sites())
        throw std::invalid_argument("subsection: block exceeds state size");
    PeakingReport rep;
    rep.label = "subsection_momentum";
    rep.block_size = block;
    rep.times = prop.times;
    const long first = initial.site_begin();
    for (std::size_t ti = 0; ti < prop.n_times(); ++ti) {
        GaussianChainState st = evolve_state(initial, prop, ti);
        double var = 0.0, mean = 0.0;
        for (long n = first; n < first + block; ++n) {
            mean += st.mean_p(n);
            for (long m = first; m < first + block; ++m) var += st.sigma_pp(n, m);
        }
        rep.variance.push_back(var);
        rep.squared_mean.push_back(mean * mean);
        rep.ratio.push_back(ratio_or_nan(var, mean * mean));
    }
    return rep;
}

double energy_block_mean(const GaussianChainState& st, long first, int block) {
    const ChainParams& par = st.params();
    double sum = 0.0;
    for (long j = first; j < first + block; ++j) {
        double ut = st.mean_q(j) - par.site_origin(j);
        sum += (st.mean_p(j) * st.mean_p(j) + st.sigma_pp(j, j)) / (2.0 * par.mass) +
               0.5 * par.binding * (ut * ut + st.sigma_qq(j, j));
    }
    return sum;
}

double energy_block_variance(const GaussianChainState& st, long first, int block) {
    const ChainParams& par = st.params();
    const double m = par.mass;
    const double K = par.binding;
    const long W = std::min<long>(st.corr_support(), block);
    double var = 0.0;
    for (long j = first; j < first + block; ++j) {
        long lo = std::max(first, j - W), hi = std::min(first + block - 1, j + W);
        for (long n = lo; n <= hi; ++n) {
            double uj = st.mean_q(j) - par.site_origin(j);
            double un = st.mean_q(n) - par.site_origin(n);
            double pj = st.mean_p(j), pn = st.mean_p(n);
            double spp = st.sigma_pp(j, n);
            double sqq = st.sigma_qq(j, n);
            double sqp_jn = st.sigma_qp(j, n);  // sigma(q_j, p_n)
            double sqp_nj = st.sigma_qp(n, j);
            // Gaussian quartic reduction: cov(A^2, B^2) = 2 s(A,B)^2 + 4 <A><B> s(A,B)
            double cpp = 2.0 * spp * spp + 4.0 * pj * pn * spp;
            double cqq = 2.0 * sqq * sqq + 4.0 * uj * un * sqq;
            double cqp = 2.0 * sqp_jn * sqp_jn + 4.0 * uj * pn * sqp_jn;  // cov(q_j^2, p_n^2)
            double cpq = 2.0 * sqp_nj * sqp_nj + 4.0 * un * pj * sqp_nj;  // cov(p_j^2, q_n^2)
            var += cpp / (4.0 * m * m) + 0.25 * K * K * cqq + K / (4.0 * m) * (cqp + cpq);
        }
    }
    return var;
}

PeakingReport subsection_energy_stats(const GaussianChainState& initial,
                                      const Propagator& prop, int block) {
    if (block < 1) throw std::invalid_argument("subsection: block size must be >= 1");
    if (block > initial.n_sites())
        throw std::invalid_argument("subsection: block exceeds state size");
    if (!(initial.params().binding > 0.0))
        throw std::invalid_argument("subsection_energy_stats: requires a bound chain (K > 0)");
    PeakingReport rep;
    rep.label = "subsection_energy";
    rep.block_size = block;
    rep.times = prop.times;
    const long first = initial.site_begin();
    for (std::size_t ti = 0; ti < prop.n_times(); ++ti) {
        GaussianChainState st = evolve_state(initial, prop, ti);
        double var = energy_block_variance(st, first, block);
        double mean = energy_block_mean(st, first, block);
        rep.variance.push_back(var);
        rep.squared_mean.push_back(mean * mean);
        rep.ratio.push_back(ratio_or_nan(var, mean * mean));
    }
    return rep;
}

}  // namespace oscchain
