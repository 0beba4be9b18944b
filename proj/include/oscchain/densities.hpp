// Fourier-space local densities n(k), g(k), tau(k): Gaussian-state means and
// variances, peaking ratios, and the decoherence scan over k.
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "oscchain/gaussian.hpp"

namespace oscchain {

struct DensityStats {
    std::vector<double> k;
    std::vector<std::complex<double>> mean;
    std::vector<double> variance;
    std::vector<double> ratio;  // variance / |mean|^2, NaN when |mean|^2 == 0
};

// <n(k)> = sum_j exp(i k <q_j> - k^2 dq_j^2 / 2),
// (Dn)^2 = sum_{jn} <e^{ikq_j}><e^{-ikq_n}> (e^{k^2 s(q_j,q_n)} - 1).
DensityStats number_density_stats(const GaussianChainState& state,
                                  std::span<const double> k_grid);

// <g(k)> = sum_j (<p_j> + i k s(q_j,p_j)) exp(i k <q_j> - k^2 dq_j^2/2) and the
// exact Gaussian variance (assembled from the characteristic function).
DensityStats momentum_density_stats(const GaussianChainState& state,
                                    std::span<const double> k_grid);

// <tau(k)> = sum_j [ (<p_j> + ik s(q_j,p_j))^2/m + C_j ] e^{ik<q_j> - k^2 dq_j^2/2}
//          + (nu^2/ik) sum_j (<q_{j+1}> - 2<q_j> + <q_{j-1}>) e^{ik<q_j> - k^2 dq_j^2/2},
// C_j = dp_j^2/m + nu^2 [ s(q_{j+1},q_j) - 2 dq_j^2 + s(q_j,q_{j-1}) ].
// The k = 0 entry is the analytic limit of the finite-difference term.
std::vector<std::complex<double>> stress_mean(const GaussianChainState& state,
                                              std::span<const double> k_grid);

// C_j alone (vanishes identically for normal-mode coherent states).
double stress_cj(const GaussianChainState& state, long j);

// Logarithmic k grid from 2 pi / (extent) down to pi / dq.
std::vector<double> default_k_grid(const GaussianChainState& state, std::size_t count);

struct DecoherenceScan {
    std::vector<double> k;
    std::vector<double> max_ratio;                  // over the trajectory, number density
    std::vector<std::vector<double>> ratio_surface; // [time][k]
    std::vector<double> times;
    std::vector<double> corr_length;                // e-folding scale of s(q_n,q_m), length units
    double k_crit = 0.0;                            // largest k with max_ratio < epsilon
};

// Number-density peaking ratio across a trajectory of states, plus the
// correlation length per time and the critical k under threshold `epsilon`.
DecoherenceScan decoherence_scan(std::span<const GaussianChainState> trajectory,
                                 std::span<const double> k_grid, double epsilon);

// e-folding separation of |sigma(q_n, q_m)| at the window centre, in length
// units (site units times the lattice spacing, or times 1 when b = 0).
double correlation_length(const GaussianChainState& state);

}  // namespace oscchain
