#include "oscchain/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oscchain {

namespace {
const double kNan = std::numeric_limits<double>::quiet_NaN();
using cplx = std::complex<double>;
const cplx kI(0.0, 1.0);

double ratio_or_nan(double var, double mean_sq) {
    return mean_sq > 0.0 ? var / mean_sq : kNan;
}

// <e^{ikq_j}> for a Gaussian marginal
cplx char_fun(double k, double qbar, double dq2) {
    return std::exp(cplx(-0.5 * k * k * dq2, k * qbar));
}

// neighbour mean position with edge continuation for window states
double mean_q_nb(const GaussianChainState& st, long j) {
    const long lo = st.site_begin(), hi = st.site_end() - 1;
    if (j >= lo && j <= hi) return st.mean_q(j);
    if (st.rep() == GaussianChainState::Rep::Dense) {
        // periodic in displacement
        long n = st.n_sites();
        long jw = ((j - lo) % n + n) % n + lo;
        double u = st.mean_q(jw) - st.params().site_origin(jw);
        return st.params().site_origin(j) + u;
    }
    long jc = std::clamp(j, lo, hi);
    double u = st.mean_q(jc) - st.params().site_origin(jc);
    return st.params().site_origin(j) + u;
}

double sigma_qq_nb(const GaussianChainState& st, long a, long b) {
    const long lo = st.site_begin(), hi = st.site_end() - 1;
    auto wrap = [&](long j) {
        if (j >= lo && j <= hi) return j;
        if (st.rep() == GaussianChainState::Rep::Dense) {
            long n = st.n_sites();
            return ((j - lo) % n + n) % n + lo;
        }
        return std::clamp(j, lo, hi);
    };
    return st.sigma_qq(wrap(a), wrap(b));
}

}  // namespace

DensityStats number_density_stats(const GaussianChainState& st,
                                  std::span<const double> k_grid) {
    DensityStats out;
    out.k.assign(k_grid.begin(), k_grid.end());
    const long lo = st.site_begin(), hi = st.site_end();
    const long W = st.corr_support();

    for (double k : k_grid) {
        cplx mean(0.0, 0.0);
        for (long j = lo; j < hi; ++j) mean += char_fun(k, st.mean_q(j), st.sigma_qq(j, j));

        double var = 0.0;
        for (long j = lo; j < hi; ++j) {
            cplx cj = char_fun(k, st.mean_q(j), st.sigma_qq(j, j));
            long nlo = std::max(lo, j - W), nhi = std::min(hi - 1, j + W);
            for (long n = nlo; n <= nhi; ++n) {
                cplx cn = std::conj(char_fun(k, st.mean_q(n), st.sigma_qq(n, n)));
                double s = st.sigma_qq(j, n);
                var += (cj * cn).real() * std::expm1(k * k * s);
            }
        }
        out.mean.push_back(mean);
        out.variance.push_back(var);
        out.ratio.push_back(ratio_or_nan(var, std::norm(mean)));
    }
    return out;
}

DensityStats momentum_density_stats(const GaussianChainState& st,
                                    std::span<const double> k_grid) {
    DensityStats out;
    out.k.assign(k_grid.begin(), k_grid.end());
    const long lo = st.site_begin(), hi = st.site_end();
    const long W = st.corr_support();

    for (double k : k_grid) {
        cplx mean(0.0, 0.0);
        for (long j = lo; j < hi; ++j)
            mean += (st.mean_p(j) + kI * k * st.sigma_qp(j, j)) *
                    char_fun(k, st.mean_q(j), st.sigma_qq(j, j));

        // <g+ g> from the Gaussian characteristic function: with
        // Y = k (u_j - u_n),
        //   <p_j p_n e^{ik(q_j - q_n)}> = e^{ik(qb_j - qb_n)} phi *
        //     [ (pb_j + i s(w_j,Y)) (pb_n + i s(w_n,Y)) + s(p_j,p_n) ]
        // where s(w_j,Y) = k (s(q_j,p_j) - s(q_n,p_j)) and
        //       s(w_n,Y) = k (s(q_j,p_n) - s(q_n,p_n)).
        cplx expect(0.0, 0.0);
        for (long j = lo; j < hi; ++j) {
            long nlo = std::max(lo, j - W), nhi = std::min(hi - 1, j + W);
            double dq2j = st.sigma_qq(j, j);
            // diagonal beyond-window part: phi reduces to |char_j|^2-free form
            for (long n = nlo; n <= nhi; ++n) {
                double dq2n = st.sigma_qq(n, n);
                double sqq = st.sigma_qq(j, n);
                double phi = std::exp(-0.5 * k * k * (dq2j + dq2n - 2.0 * sqq));
                double cwjy = k * (st.sigma_qp(j, j) - st.sigma_qp(n, j));
                double cwny = k * (st.sigma_qp(j, n) - st.sigma_qp(n, n));
                cplx amp = (st.mean_p(j) + kI * cwjy) * (st.mean_p(n) + kI * cwny) +
                           st.sigma_pp(j, n);
                cplx phase = std::exp(kI * k * (st.mean_q(j) - st.mean_q(n)));
                expect += phase * phi * amp;
            }
            // pairs with |j - n| > W: correlations vanish, the product
            // factorises into <.>_j <.>_n pieces collected below
        }
        // factorised remainder for |j - n| > W
        cplx gsum(0.0, 0.0);
        std::vector<cplx> gj(static_cast<std::size_t>(hi - lo));
        for (long j = lo; j < hi; ++j) {
            gj[static_cast<std::size_t>(j - lo)] =
                (st.mean_p(j) + kI * k * st.sigma_qp(j, j)) *
                char_fun(k, st.mean_q(j), st.sigma_qq(j, j));
            gsum += gj[static_cast<std::size_t>(j - lo)];
        }
        for (long j = lo; j < hi; ++j) {
            long nlo = std::max(lo, j - W), nhi = std::min(hi - 1, j + W);
            cplx near(0.0, 0.0);
            for (long n = nlo; n <= nhi; ++n) near += std::conj(gj[static_cast<std::size_t>(n - lo)]);
            expect += gj[static_cast<std::size_t>(j - lo)] * (std::conj(gsum) - near);
        }

        double var = expect.real() - std::norm(mean);
        out.mean.push_back(mean);
        out.variance.push_back(var);
        out.ratio.push_back(ratio_or_nan(var, std::norm(mean)));
    }
    return out;
}

double stress_cj(const GaussianChainState& st, long j) {
    const ChainParams& par = st.params();
    return st.sigma_pp(j, j) / par.mass +
           par.coupling * (sigma_qq_nb(st, j + 1, j) - 2.0 * st.sigma_qq(j, j) +
                           sigma_qq_nb(st, j, j - 1));
}

std::vector<cplx> stress_mean(const GaussianChainState& st, std::span<const double> k_grid) {
    const ChainParams& par = st.params();
    const long lo = st.site_begin(), hi = st.site_end();
    std::vector<cplx> out;
    out.reserve(k_grid.size());
    for (double k : k_grid) {
        cplx sum(0.0, 0.0);
        for (long j = lo; j < hi; ++j) {
            cplx cf = char_fun(k, st.mean_q(j), st.sigma_qq(j, j));
            cplx pterm = st.mean_p(j) + kI * k * st.sigma_qp(j, j);
            sum += (pterm * pterm / par.mass + stress_cj(st, j)) * cf;
            double lap = mean_q_nb(st, j + 1) - 2.0 * st.mean_q(j) + mean_q_nb(st, j - 1);
            if (k != 0.0) {
                sum += par.coupling * lap / (kI * k) * cf;
            } else {
                // analytic limit: sum_j lap_j / (ik) -> sum_j lap_j qbar_j
                // (the 1/(ik) piece cancels when sum_j lap_j = 0)
                sum += par.coupling * lap * st.mean_q(j);
            }
        }
        out.push_back(sum);
    }
    return out;
}

std::vector<double> default_k_grid(const GaussianChainState& st, std::size_t count) {
    const ChainParams& par = st.params();
    double extent = (par.spacing > 0.0 ? par.spacing : 1.0) * static_cast<double>(st.n_sites());
    double dq = std::sqrt(st.sigma_qq(st.site_begin(), st.site_begin()));
    double k_min = 2.0 * std::numbers::pi / extent;
    double k_max = std::numbers::pi / dq;
    if (!(k_max > k_min)) std::swap(k_max, k_min);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        double f = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
        out[i] = k_min * std::pow(k_max / k_min, f);
    }
    return out;
}

double correlation_length(const GaussianChainState& st) {
    const long c = st.site_begin() + st.n_sites() / 2;
    const double s0 = std::abs(st.sigma_qq(c, c));
    const double unit = st.params().spacing > 0.0 ? st.params().spacing : 1.0;
    if (s0 == 0.0) return unit;
    const long smax = std::min<long>(st.corr_support() + 2, st.site_end() - 1 - c);
    for (long s = 1; s <= smax; ++s) {
        if (std::abs(st.sigma_qq(c, c + s)) < s0 / std::numbers::e)
            return unit * static_cast<double>(s);
    }
    return unit * static_cast<double>(std::max<long>(smax, 1));
}

DecoherenceScan decoherence_scan(std::span<const GaussianChainState> trajectory,
                                 std::span<const double> k_grid, double epsilon) {
    if (trajectory.empty()) throw std::invalid_argument("decoherence_scan: empty trajectory");
    DecoherenceScan scan;
    scan.k.assign(k_grid.begin(), k_grid.end());
    scan.max_ratio.assign(k_grid.size(), 0.0);
    for (const GaussianChainState& st : trajectory) {
        scan.times.push_back(st.time());
        scan.corr_length.push_back(correlation_length(st));
        DensityStats ds = number_density_stats(st, k_grid);
        scan.ratio_surface.push_back(ds.ratio);
        for (std::size_t i = 0; i < k_grid.size(); ++i) {
            double r = ds.ratio[i];
            if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
            scan.max_ratio[i] = std::max(scan.max_ratio[i], r);
        }
    }
    scan.k_crit = 0.0;
    for (std::size_t i = 0; i < k_grid.size(); ++i)
        if (scan.max_ratio[i] < epsilon) scan.k_crit = std::max(scan.k_crit, scan.k[i]);
    return scan;
}

}  // namespace oscchain
