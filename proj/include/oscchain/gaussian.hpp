// Gaussian chain states: product states, normal-mode coherent states, exact
// covariance propagation (dense symplectic map for finite chains, closed-form
// correlation coefficients for infinite ones), and the bound-chain
// equilibrium limits.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "oscchain/chain.hpp"

namespace oscchain {

// The six coefficient families entering the evolved correlations of an
// initially uncorrelated homogeneous state:
//   sigma(q_n,q_m) = a dq2 + 2 e sqp + d dp2
//   sigma(q_n,p_m) = b dq2 + (a + k) sqp + e dp2
//   sigma(p_n,p_m) = c dq2 + 2 b sqp + a dp2
struct CorrelationCoefficients {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0, k = 0.0;
};

// Closed forms for the infinite chains (kind = InfiniteSimple or
// InfiniteBound); separation = n - m.
CorrelationCoefficients correlation_coefficients(const ChainParams& params,
                                                 PropagatorKind kind,
                                                 long separation, double t);

class GaussianChainState {
  public:
    enum class Rep { Dense, Homogeneous };

    // Product (uncorrelated) state. Finite chains produce a dense state with
    // arrays of length N; infinite chains produce a homogeneous/slowly-varying
    // descriptor over sites [window_lo, window_lo + size). Per-site widths
    // must satisfy dq2*dp2 - sqp^2 >= hbar^2/4.
    static GaussianChainState product_state(const ChainParams& params,
                                            std::vector<double> qbar,
                                            std::vector<double> pbar,
                                            std::vector<double> dq2,
                                            std::vector<double> dp2,
                                            std::vector<double> sqp,
                                            long window_lo = 0);

    // Normal-mode coherent state (finite chains). Covariances are stationary
    // under evolution. For K = 0 the zero mode's amplitude is ignored and the
    // q-covariance sum drops `excluded_mode_cluster` modes closest to
    // alpha = N (the divergent 1/omega_alpha cluster).
    static GaussianChainState normal_mode_coherent_state(
        const ChainParams& params, std::span<const std::complex<double>> amplitudes,
        int excluded_mode_cluster = 3);

    Rep rep() const { return rep_; }
    const ChainParams& params() const { return params_; }
    double time() const { return time_; }
    bool covariance_stationary() const { return stationary_cov_; }
    bool zero_mode_amplitude_ignored() const { return zero_mode_ignored_; }
    bool slowly_varying() const { return slowly_varying_; }

    long site_begin() const { return window_lo_; }
    long site_end() const { return window_lo_ + static_cast<long>(qbar_.size()); }
    long n_sites() const { return static_cast<long>(qbar_.size()); }

    double mean_q(long n) const;
    double mean_p(long n) const;
    double sigma_qq(long n, long m) const;
    double sigma_qp(long n, long m) const;  // sigma(q_n, p_m)
    double sigma_pp(long n, long m) const;
    double var_q(long n) const { return sigma_qq(n, n); }
    double var_p(long n) const { return sigma_pp(n, n); }

    // separation beyond which |sigma(q_n,q_m)| etc. are negligible
    long corr_support() const;

    // dense-representation access (throws for homogeneous states)
    const Eigen::MatrixXd& dense_sqq() const;
    const Eigen::MatrixXd& dense_sqp() const;
    const Eigen::MatrixXd& dense_spp() const;

    // columnar text snapshot: site, qbar, pbar, dq2, dp2, sqp
    void write_snapshot(std::ostream& os) const;

    friend GaussianChainState evolve_state(const GaussianChainState&, const Propagator&,
                                           std::size_t);

  private:
    GaussianChainState() = default;

    Rep rep_ = Rep::Dense;
    ChainParams params_;
    double time_ = 0.0;
    long window_lo_ = 0;
    bool stationary_cov_ = false;
    bool zero_mode_ignored_ = false;
    bool slowly_varying_ = false;

    std::vector<double> qbar_, pbar_;

    // dense
    Eigen::MatrixXd sqq_, sqp_, spp_;

    // homogeneous descriptor: initial per-site widths plus, once evolved,
    // coefficient tables by separation (index |n - m|, up to support_)
    std::vector<double> dq2_0_, dp2_0_, sqp_0_;
    std::vector<double> ca_, cb_, cc_, cd_, ce_, ck_;
    long support_ = 0;
    PropagatorKind evolved_kind_ = PropagatorKind::InfiniteSimple;

    double homog_initial(long n, const std::vector<double>& arr) const;
};

// Exact propagation: means via evolve_means, covariance via the symplectic
// map Sigma -> S Sigma S^T (dense) or the closed-form coefficient tables
// (homogeneous; requires an uncorrelated initial state at t = 0).
GaussianChainState evolve_state(const GaussianChainState& state, const Propagator& prop,
                                std::size_t time_index);

struct EquilibriumLimits {
    double sqq_inf = 0.0;  // -> (dq2 + dp2/(m Omega)^2) / 2
    double spp_inf = 0.0;  // -> ((m Omega)^2 dq2 + dp2) / 2
    double kT = 0.0;       // ((m Omega)^2 dq2 + dp2) / (2 m)
};

// Long-time limits of the bound chain. Throws std::domain_error for K = 0
// (the simple chain has no equilibrium distribution).
EquilibriumLimits equilibrium_limits(const ChainParams& params, double dq2, double dp2);

// Symplectic spectrum of the full covariance (dense states): the moduli of
// the eigenvalues of J Sigma, each >= hbar/2 for a physical state.
std::vector<double> symplectic_eigenvalues(const GaussianChainState& state);

}  // namespace oscchain
