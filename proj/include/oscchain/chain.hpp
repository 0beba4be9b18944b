// Chain definition, normal-mode spectrum, and the propagator coefficient
// families f_r(t), g_r(t) (finite DFT sums or infinite-chain Bessel forms),
// plus evolution of first moments.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace oscchain {

struct ChainParams {
    long n_particles = 0;   // 0 => infinite chain
    double mass = 1.0;      // m > 0
    double coupling = 1.0;  // nu^2 >= 0 (nearest-neighbour spring)
    double binding = 0.0;   // K >= 0 (on-site spring); K = 0 is the simple chain
    double spacing = 0.0;   // b >= 0, site origins b_n = n b
    double hbar = 1.0;

    bool infinite() const { return n_particles == 0; }
    double omega() const;      // omega = sqrt(nu^2 / m)
    double big_omega() const;  // Omega = sqrt((K + 2 nu^2) / m)
    double gamma() const;      // (omega / Omega)^2
    // The infinite-bound Bessel forms assume weak coupling, gamma < 0.1.
    bool bound_bessel_valid() const { return binding > 0.0 && gamma() < 0.1; }
    double site_origin(long n) const { return spacing * static_cast<double>(n); }

    void validate() const;  // throws std::invalid_argument with a field name
};

struct NormalModeSpectrum {
    std::vector<double> frequencies;  // omega_alpha, alpha = 1..N stored at [alpha-1]
    std::vector<long> zero_modes;     // alpha values with omega_alpha == 0
};

// omega_alpha = sqrt(K/m + (4 nu^2/m) sin^2(pi alpha / N)). Finite chains only.
NormalModeSpectrum normal_mode_frequencies(const ChainParams& params);

enum class PropagatorKind { FiniteDft, InfiniteSimple, InfiniteBound };

std::string to_string(PropagatorKind kind);

// Tables of f_r(t), g_r(t) and their time derivatives on a caller-supplied
// time grid. Finite chains store offsets r = 0..N-1 (periodic); infinite
// chains store a window r in [-R, R]. Tables are immutable once built and
// safe to share across threads.
struct Propagator {
    PropagatorKind kind = PropagatorKind::FiniteDft;
    ChainParams params;
    std::vector<double> times;
    long window_radius = 0;  // R for infinite kinds; unused for finite
    bool truncated = false;  // window too small: |f_R| > 1e-12 somewhere

    // [time][offset]; offset layout depends on kind (see at() helpers)
    std::vector<std::vector<double>> f, g, fdot, gdot;

    std::size_t n_times() const { return times.size(); }
    double f_at(std::size_t ti, long offset) const;
    double g_at(std::size_t ti, long offset) const;
    double fdot_at(std::size_t ti, long offset) const;
    double gdot_at(std::size_t ti, long offset) const;

  private:
    std::size_t slot(long offset) const;  // maps offset to table column (0 outside window)
    friend Propagator make_propagator(const ChainParams&, PropagatorKind,
                                      std::span<const double>, long);
};

// window_radius < 0 selects an automatic window large enough that the
// truncated tail is below 1e-12 at the largest requested time.
Propagator make_propagator(const ChainParams& params, PropagatorKind kind,
                           std::span<const double> t_grid, long window_radius = -1);

struct Means {
    std::vector<double> q;
    std::vector<double> p;
};

// q_n(t) = b_n + sum_r [ f_{r-n}(t) (q_r(0) - b_r) + g_{r-n}(t) p_r(0) / (m Omega) ],
// p_n(t) = m dq_n/dt. For infinite chains the arrays cover sites
// [window_lo, window_lo + size); data beyond the edges is continued with the
// edge values of (q - b) and p.
Means evolve_means(const Propagator& prop, std::size_t time_index,
                   std::span<const double> q0, std::span<const double> p0,
                   long window_lo = 0);

// Mean-field energy sum_n [ p^2/2m + (nu^2/2)(q_n - q_{n-1})^2 + (K/2)(q_n - b_n)^2 ]
// (periodic closure q_{N+1} = q_1 for finite chains).
double mean_field_energy(const ChainParams& params, std::span<const double> q,
                         std::span<const double> p, long window_lo = 0);

}  // namespace oscchain
