#include "oscchain/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "oscchain/specfun.hpp"

namespace oscchain {

namespace {
constexpr double kSupportTol = 1e-14;

double kronecker(long a, long b) { return a == b ? 1.0 : 0.0; }
}  // namespace

CorrelationCoefficients correlation_coefficients(const ChainParams& params,
                                                 PropagatorKind kind,
                                                 long separation, double t) {
    params.validate();
    const double m = params.mass;
    CorrelationCoefficients out;
    const long d = separation;

    if (kind == PropagatorKind::InfiniteSimple) {
        const double om = params.omega();
        const double x = 4.0 * om * t;
        long ad = std::labs(d);
        int top = static_cast<int>(2 * ad + 2);
        auto j = specfun::bessel_j_row(std::max(top, 2), x);
        auto jj = [&](long n) {
            long a = std::labs(n);
            double v = j[static_cast<std::size_t>(a)];
            return (n < 0 && a % 2 == 1) ? -v : v;
        };
        double j2d = jj(2 * d);
        out.a = 0.5 * (kronecker(d, 0) + j2d);
        out.b = 0.5 * m * om * (jj(2 * d - 1) - jj(2 * d + 1));
        out.c = 0.5 * m * m * om * om *
                (jj(2 * d + 2) + jj(2 * d - 2) - 2.0 * j2d + 2.0 * kronecker(d, 0) -
                 kronecker(std::labs(d), 1));
        auto integrals = specfun::bessel_j_integral_row(static_cast<int>(2 * ad), x);
        double i0 = integrals[0];
        double odd_sum = 0.0;
        for (long jdx = 1; jdx <= ad; ++jdx)
            odd_sum += integrals[static_cast<std::size_t>(2 * jdx - 1)];
        out.d = t / (2.0 * om * m * m) * (i0 - jj(1)) -
                odd_sum / (4.0 * om * om * m * m);
        out.e = integrals[static_cast<std::size_t>(2 * ad)] / (4.0 * om * m);
        out.k = 0.5 * (j2d - kronecker(d, 0));
        return out;
    }

    if (kind == PropagatorKind::InfiniteBound) {
        if (!params.bound_bessel_valid())
            throw std::invalid_argument(
                "correlation_coefficients: bound closed forms need K > 0, gamma < 0.1");
        const double Om = params.big_omega();
        const double ga = params.gamma();
        const double x = 2.0 * ga * Om * t;
        long ad = std::labs(d);
        auto j = specfun::bessel_j_row(static_cast<int>(ad), x);
        double jd = j[static_cast<std::size_t>(ad)] * ((d < 0 && ad % 2 == 1) ? -1.0 : 1.0);
        const double ph = 2.0 * Om * t - 0.5 * std::numbers::pi * static_cast<double>(d);
        const double mo = m * Om;
        out.a = 0.5 * (kronecker(d, 0) + jd * std::cos(ph));
        out.b = -0.5 * mo * jd * std::sin(ph);
        out.c = 0.5 * mo * mo * (kronecker(d, 0) - jd * std::cos(ph));
        out.d = out.c / (mo * mo * mo * mo);
        out.e = -out.b / (mo * mo);
        out.k = -out.c / (mo * mo);
        return out;
    }

    throw std::invalid_argument("correlation_coefficients: closed forms exist only for infinite chains");
}

double GaussianChainState::homog_initial(long n, const std::vector<double>& arr) const {
    long i = std::clamp(n - window_lo_, 0L, static_cast<long>(arr.size()) - 1);
    return arr[static_cast<std::size_t>(i)];
}

GaussianChainState GaussianChainState::product_state(const ChainParams& params,
                                                     std::vector<double> qbar,
                                                     std::vector<double> pbar,
                                                     std::vector<double> dq2,
                                                     std::vector<double> dp2,
                                                     std::vector<double> sqp,
                                                     long window_lo) {
    params.validate();
    const std::size_t n = qbar.size();
    if (pbar.size() != n || dq2.size() != n || dp2.size() != n || sqp.size() != n)
        throw std::invalid_argument("product_state: array sizes disagree");
    if (!params.infinite() && static_cast<long>(n) != params.n_particles)
        throw std::invalid_argument("product_state: arrays must cover all N sites");
    const double floor = 0.25 * params.hbar * params.hbar * (1.0 - 1e-12);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(dq2[i] > 0.0) || !(dp2[i] > 0.0))
            throw std::invalid_argument("product_state: widths must be positive");
        if (dq2[i] * dp2[i] - sqp[i] * sqp[i] < floor)
            throw std::invalid_argument("product_state: uncertainty bound violated");
    }

    GaussianChainState st;
    st.params_ = params;
    st.window_lo_ = params.infinite() ? window_lo : 0;
    st.qbar_ = std::move(qbar);
    st.pbar_ = std::move(pbar);

    auto varies = [](const std::vector<double>& v) {
        for (double x : v)
            if (std::abs(x - v.front()) > 1e-12 * (std::abs(v.front()) + 1e-300)) return true;
        return false;
    };
    st.slowly_varying_ = varies(dq2) || varies(dp2) || varies(sqp);

    if (params.infinite()) {
        st.rep_ = Rep::Homogeneous;
        st.dq2_0_ = std::move(dq2);
        st.dp2_0_ = std::move(dp2);
        st.sqp_0_ = std::move(sqp);
        st.support_ = 0;
        st.ca_ = {1.0};  // identity coefficients at t = 0
        st.cb_ = {0.0};
        st.cc_ = {0.0};
        st.cd_ = {0.0};
        st.ce_ = {0.0};
        st.ck_ = {0.0};
    } else {
        st.rep_ = Rep::Dense;
        const long N = params.n_particles;
        st.sqq_ = Eigen::MatrixXd::Zero(N, N);
        st.sqp_ = Eigen::MatrixXd::Zero(N, N);
        st.spp_ = Eigen::MatrixXd::Zero(N, N);
        for (long i = 0; i < N; ++i) {
            st.sqq_(i, i) = dq2[static_cast<std::size_t>(i)];
            st.spp_(i, i) = dp2[static_cast<std::size_t>(i)];
            st.sqp_(i, i) = sqp[static_cast<std::size_t>(i)];
        }
    }
    return st;
}

GaussianChainState GaussianChainState::normal_mode_coherent_state(
    const ChainParams& params, std::span<const std::complex<double>> amplitudes,
    int excluded_mode_cluster) {
    params.validate();
    if (params.infinite())
        throw std::invalid_argument("normal_mode_coherent_state: finite chains only");
    const long N = params.n_particles;
    if (static_cast<long>(amplitudes.size()) != N)
        throw std::invalid_argument("normal_mode_coherent_state: need one amplitude per mode");
    NormalModeSpectrum spec = normal_mode_frequencies(params);
    const double hbar = params.hbar;
    const double m = params.mass;

    GaussianChainState st;
    st.rep_ = Rep::Dense;
    st.params_ = params;
    st.stationary_cov_ = true;

    // means: mode alpha carries a coherent amplitude z_alpha with complex
    // centre Qbar_alpha = sqrt(2 hbar/(m w)) z_alpha and conjugate momentum
    // Kbar_alpha = -i m w Qbar_alpha; real parts taken in site space.
    st.qbar_.assign(static_cast<std::size_t>(N), 0.0);
    st.pbar_.assign(static_cast<std::size_t>(N), 0.0);
    const bool simple = params.binding == 0.0;
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
    for (long alpha = 1; alpha <= N; ++alpha) {
        double w = spec.frequencies[static_cast<std::size_t>(alpha - 1)];
        bool zero = std::find(spec.zero_modes.begin(), spec.zero_modes.end(), alpha) !=
                    spec.zero_modes.end();
        if (zero) {
            if (std::abs(amplitudes[static_cast<std::size_t>(alpha - 1)]) > 0.0)
                st.zero_mode_ignored_ = true;
            continue;
        }
        std::complex<double> z = amplitudes[static_cast<std::size_t>(alpha - 1)];
        std::complex<double> qc = std::sqrt(2.0 * hbar / (m * w)) * z;
        std::complex<double> kc = std::complex<double>(0.0, -1.0) * (m * w) * qc;
        for (long n = 0; n < N; ++n) {
            double th = 2.0 * std::numbers::pi * static_cast<double>((alpha * n) % N) /
                        static_cast<double>(N);
            std::complex<double> ph(std::cos(th), std::sin(th));
            st.qbar_[static_cast<std::size_t>(n)] += (ph * qc).real() * inv_sqrt_n;
            st.pbar_[static_cast<std::size_t>(n)] += (ph * kc).real() * inv_sqrt_n;
        }
    }
    for (long n = 0; n < N; ++n) st.qbar_[static_cast<std::size_t>(n)] += params.site_origin(n);

    // q-covariance drops the zero mode plus, for the simple chain, the
    // excluded cluster next to alpha = N where 1/omega_alpha blows up
    std::vector<bool> q_excluded(static_cast<std::size_t>(N) + 1, false);
    for (long alpha : spec.zero_modes) q_excluded[static_cast<std::size_t>(alpha)] = true;
    if (simple) {
        for (int c = 0; c < excluded_mode_cluster; ++c) {
            long alpha = N - c;
            if (alpha >= 1) q_excluded[static_cast<std::size_t>(alpha)] = true;
        }
    }

    st.sqq_ = Eigen::MatrixXd::Zero(N, N);
    st.sqp_ = Eigen::MatrixXd::Zero(N, N);
    st.spp_ = Eigen::MatrixXd::Zero(N, N);
    for (long diff = 0; diff < N; ++diff) {
        double sq = 0.0, sp = 0.0;
        for (long alpha = 1; alpha <= N; ++alpha) {
            double w = spec.frequencies[static_cast<std::size_t>(alpha - 1)];
            double th = 2.0 * std::numbers::pi * static_cast<double>((alpha * diff) % N) /
                        static_cast<double>(N);
            double c = std::cos(th);
            if (!q_excluded[static_cast<std::size_t>(alpha)]) sq += hbar / (2.0 * m * w) * c;
            sp += 0.5 * hbar * m * w * c;
        }
        sq /= static_cast<double>(N);
        sp /= static_cast<double>(N);
        for (long n = 0; n < N; ++n) {
            long mm = (n + diff) % N;
            st.sqq_(n, mm) = sq;
            st.sqq_(mm, n) = sq;
            st.spp_(n, mm) = sp;
            st.spp_(mm, n) = sp;
        }
    }
    return st;
}

double GaussianChainState::mean_q(long n) const {
    long i = n - window_lo_;
    return qbar_[static_cast<std::size_t>(i)];
}
double GaussianChainState::mean_p(long n) const {
    long i = n - window_lo_;
    return pbar_[static_cast<std::size_t>(i)];
}

double GaussianChainState::sigma_qq(long n, long m) const {
    if (rep_ == Rep::Dense) return sqq_(n, m);
    long d = std::labs(n - m);
    long mid = (n + m) / 2;
    if (d > support_)
        return (d == 0) ? homog_initial(mid, dq2_0_) : 0.0;  // support_ covers t = 0 too
    return ca_[static_cast<std::size_t>(d)] * homog_initial(mid, dq2_0_) +
           2.0 * ce_[static_cast<std::size_t>(d)] * homog_initial(mid, sqp_0_) +
           cd_[static_cast<std::size_t>(d)] * homog_initial(mid, dp2_0_);
}

double GaussianChainState::sigma_qp(long n, long m) const {
    if (rep_ == Rep::Dense) return sqp_(n, m);
    long d = std::labs(n - m);
    long mid = (n + m) / 2;
    if (d > support_) return 0.0;
    return cb_[static_cast<std::size_t>(d)] * homog_initial(mid, dq2_0_) +
           (ca_[static_cast<std::size_t>(d)] + ck_[static_cast<std::size_t>(d)]) *
               homog_initial(mid, sqp_0_) +
           ce_[static_cast<std::size_t>(d)] * homog_initial(mid, dp2_0_);
}

double GaussianChainState::sigma_pp(long n, long m) const {
    if (rep_ == Rep::Dense) return spp_(n, m);
    long d = std::labs(n - m);
    long mid = (n + m) / 2;
    if (d > support_) return (d == 0) ? homog_initial(mid, dp2_0_) : 0.0;
    return cc_[static_cast<std::size_t>(d)] * homog_initial(mid, dq2_0_) +
           2.0 * cb_[static_cast<std::size_t>(d)] * homog_initial(mid, sqp_0_) +
           ca_[static_cast<std::size_t>(d)] * homog_initial(mid, dp2_0_);
}

long GaussianChainState::corr_support() const {
    if (rep_ == Rep::Dense) return n_sites();
    return support_;
}

const Eigen::MatrixXd& GaussianChainState::dense_sqq() const {
    if (rep_ != Rep::Dense) throw std::logic_error("dense_sqq: homogeneous state");
    return sqq_;
}
const Eigen::MatrixXd& GaussianChainState::dense_sqp() const {
    if (rep_ != Rep::Dense) throw std::logic_error("dense_sqp: homogeneous state");
    return sqp_;
}
const Eigen::MatrixXd& GaussianChainState::dense_spp() const {
    if (rep_ != Rep::Dense) throw std::logic_error("dense_spp: homogeneous state");
    return spp_;
}

void GaussianChainState::write_snapshot(std::ostream& os) const {
    os << "# site qbar pbar dq2 dp2 sqp\n";
    char buf[256];
    for (long n = site_begin(); n < site_end(); ++n) {
        std::snprintf(buf, sizeof buf, "%ld %.17g %.17g %.17g %.17g %.17g\n", n, mean_q(n),
                      mean_p(n), sigma_qq(n, n), sigma_pp(n, n), sigma_qp(n, n));
        os << buf;
    }
}

GaussianChainState evolve_state(const GaussianChainState& state, const Propagator& prop,
                                std::size_t time_index) {
    if (time_index >= prop.n_times()) throw std::invalid_argument("evolve_state: bad time index");
    const double t = prop.times[time_index];
    const ChainParams& par = state.params_;

    GaussianChainState out = state;
    out.time_ = t;

    Means mv = evolve_means(prop, time_index, state.qbar_, state.pbar_, state.window_lo_);
    out.qbar_ = std::move(mv.q);
    out.pbar_ = std::move(mv.p);

    if (state.rep_ == GaussianChainState::Rep::Dense) {
        if (state.stationary_cov_) return out;  // coherent-state covariances do not move
        if (prop.kind != PropagatorKind::FiniteDft)
            throw std::invalid_argument("evolve_state: dense states need a finite-dft propagator");
        const long N = par.n_particles;
        const double m_om = par.mass * par.big_omega();
        Eigen::MatrixXd F(N, N), G(N, N), Fd(N, N), Gd(N, N);
        for (long n = 0; n < N; ++n) {
            for (long r = 0; r < N; ++r) {
                F(n, r) = prop.f_at(time_index, r - n);
                G(n, r) = prop.g_at(time_index, r - n) / m_om;
                Fd(n, r) = par.mass * prop.fdot_at(time_index, r - n);
                Gd(n, r) = prop.gdot_at(time_index, r - n) / par.big_omega();
            }
        }
        Eigen::MatrixXd S(2 * N, 2 * N);
        S << F, G, Fd, Gd;
        Eigen::MatrixXd Sig(2 * N, 2 * N);
        Sig << state.sqq_, state.sqp_, state.sqp_.transpose(), state.spp_;
        Eigen::MatrixXd Sig_t = S * Sig * S.transpose();
        out.sqq_ = 0.5 * (Sig_t.topLeftCorner(N, N) + Sig_t.topLeftCorner(N, N).transpose());
        out.sqp_ = Sig_t.topRightCorner(N, N);
        out.spp_ = 0.5 * (Sig_t.bottomRightCorner(N, N) + Sig_t.bottomRightCorner(N, N).transpose());
        return out;
    }

    // homogeneous path: closed forms, valid from an uncorrelated t = 0 state
    if (state.time_ != 0.0)
        throw std::invalid_argument("evolve_state: homogeneous path evolves from t = 0 only");
    if (prop.kind == PropagatorKind::FiniteDft)
        throw std::invalid_argument("evolve_state: homogeneous states need an infinite propagator");

    long support;
    if (prop.kind == PropagatorKind::InfiniteSimple) {
        double x = 4.0 * par.omega() * t;
        support = static_cast<long>(std::ceil(0.5 * (x + 10.0 * std::cbrt(std::max(x, 1.0)) + 16.0)));
    } else {
        double x = 2.0 * par.gamma() * par.big_omega() * t;
        support = static_cast<long>(std::ceil(x + 10.0 * std::cbrt(std::max(x, 1.0)) + 16.0));
    }
    out.support_ = support;
    out.evolved_kind_ = prop.kind;
    out.ca_.resize(static_cast<std::size_t>(support) + 1);
    out.cb_.resize(static_cast<std::size_t>(support) + 1);
    out.cc_.resize(static_cast<std::size_t>(support) + 1);
    out.cd_.resize(static_cast<std::size_t>(support) + 1);
    out.ce_.resize(static_cast<std::size_t>(support) + 1);
    out.ck_.resize(static_cast<std::size_t>(support) + 1);
    for (long d = 0; d <= support; ++d) {
        CorrelationCoefficients cc = correlation_coefficients(par, prop.kind, d, t);
        out.ca_[static_cast<std::size_t>(d)] = cc.a;
        out.cb_[static_cast<std::size_t>(d)] = cc.b;
        out.cc_[static_cast<std::size_t>(d)] = cc.c;
        out.cd_[static_cast<std::size_t>(d)] = cc.d;
        out.ce_[static_cast<std::size_t>(d)] = cc.e;
        out.ck_[static_cast<std::size_t>(d)] = cc.k;
    }
    return out;
}

EquilibriumLimits equilibrium_limits(const ChainParams& params, double dq2, double dp2) {
    params.validate();
    if (params.binding == 0.0)
        throw std::domain_error("equilibrium_limits: the simple chain has no equilibrium distribution");
    const double mo = params.mass * params.big_omega();
    EquilibriumLimits lim;
    lim.sqq_inf = 0.5 * (dq2 + dp2 / (mo * mo));
    lim.spp_inf = 0.5 * (mo * mo * dq2 + dp2);
    lim.kT = lim.spp_inf / params.mass;
    return lim;
}

std::vector<double> symplectic_eigenvalues(const GaussianChainState& state) {
    if (state.rep() != GaussianChainState::Rep::Dense)
        throw std::invalid_argument("symplectic_eigenvalues: dense states only");
    const long N = state.n_sites();
    Eigen::MatrixXd Sig(2 * N, 2 * N);
    Sig << state.dense_sqq(), state.dense_sqp(), state.dense_sqp().transpose(), state.dense_spp();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    J.topRightCorner(N, N) = Eigen::MatrixXd::Identity(N, N);
    J.bottomLeftCorner(N, N) = -Eigen::MatrixXd::Identity(N, N);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J * Sig, false);
    std::vector<double> nus;
    for (long i = 0; i < 2 * N; ++i) {
        double im = es.eigenvalues()(i).imag();
        if (im > 0.0) nus.push_back(im);
    }
    std::sort(nus.begin(), nus.end());
    return nus;
}

}  // namespace oscchain
