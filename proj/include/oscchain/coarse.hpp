// Chain-subsection coarse-grainings: momentum and energy of M-particle
// blocks, their variances, and the peaking ratio variance/<Q>^2 whose
// smallness marks an approximate eigenstate.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "oscchain/chain.hpp"
#include "oscchain/gaussian.hpp"

namespace oscchain {

struct PeakingReport {
    std::string label;
    int block_size = 0;  // M
    std::vector<double> times;
    std::vector<double> variance;
    std::vector<double> squared_mean;
    std::vector<double> ratio;  // NaN where squared_mean <= 0 (flagged row)
    // optional extra series (e.g. the fluctuating subsection sum)
    std::string extra_label;
    std::vector<double> extra;
};

struct SubsectionMomentumCoefficients {
    std::vector<double> a_full;   // A_M = sum a_nm (includes the static delta part)
    std::vector<double> a_fluct;  // A~_M = (1/2) sum J_{2n-2m}(4 w t) (simple chain)
    std::vector<double> c_full;   // C_M = sum c_nm
};

// Block sums of the closed-form coefficients on a time grid. For the simple
// chain a_fluct is the delta-stripped sum the late-time discussion uses; for
// the bound chain it is A_M - M/2.
SubsectionMomentumCoefficients subsection_momentum_coefficients(
    const ChainParams& params, PropagatorKind kind, int block, std::span<const double> t_grid);

// Closed-form path: homogeneous uncorrelated initial state with widths
// (dq2, dp2), sigma(q,p) = 0, and uniform drift pbar = m v0. Reports
// (Delta P_M)^2 = C_M dq2 + A_M dp2 and A~_M as the extra series.
PeakingReport subsection_momentum_stats(const ChainParams& params, PropagatorKind kind,
                                        double dq2, double dp2, double drift_velocity,
                                        int block, std::span<const double> t_grid);

// Trajectory path: evolves `initial` with `prop` and sums the covariance
// block directly; works for dense and homogeneous states alike. Blocks start
// at the state's first site.
PeakingReport subsection_momentum_stats(const GaussianChainState& initial,
                                        const Propagator& prop, int block);

// Energy of a block of tightly bound sites, h_j = p_j^2/2m + (K/2)(q_j-b_j)^2,
// with Gaussian moment formulas for sigma(h_j, h_n). Requires K > 0.
PeakingReport subsection_energy_stats(const GaussianChainState& initial,
                                      const Propagator& prop, int block);

// sigma(h_j, h_n) of one state; exposed for the oracle tests.
double energy_block_variance(const GaussianChainState& state, long first_site, int block);
double energy_block_mean(const GaussianChainState& state, long first_site, int block);

}  // namespace oscchain
