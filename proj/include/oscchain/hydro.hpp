// Field extraction from microscopic averages, the two hydrodynamic solvers
// (linear wave equation for density perturbations; f/v/theta Euler fluid in a
// harmonic potential), the micro-vs-PDE comparison harness, and the
// local-equilibrium diagnostics.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "oscchain/gaussian.hpp"

namespace oscchain {

struct HydroFields {
    std::vector<double> x;
    std::vector<double> n;       // smeared number density
    std::vector<double> n0;      // background from the site origins
    std::vector<double> n1;      // n - n0
    std::vector<double> v;       // velocity, masked where n < floor
    std::vector<double> theta;   // k_B T in energy units, masked likewise
    std::vector<double> f;       // n / (particle count): one-particle normalisation
    std::vector<char> masked;    // 1 where v/theta are unreliable
};

// Gaussian smearing kernel of width w:
//   n(x)     = sum_j K_w(x - <q_j>),         g(x) = sum_j <p_j> K_w(...),
//   v        = g / (m n),                    theta = sum_j dp_j^2 K_w(...) / (m n).
HydroFields extract_fields(const GaussianChainState& state, std::span<const double> grid,
                           double smear_width, double n_floor = -1.0);

enum class Boundary { Periodic, Reflecting };

struct WaveResult {
    std::vector<double> times;
    std::vector<std::vector<double>> n1;  // [time][x]
};

// Leapfrog d^2 n1/dt^2 = c^2 d^2 n1/dx^2 on a uniform grid. Output times must
// be (near-)integer multiples of dt; refuses when c dt/dx > 1.
WaveResult wave_solve(std::span<const double> n1_0, std::span<const double> dn1dt_0,
                      double c, double dx, double dt, std::span<const double> t_out,
                      Boundary bc);

struct EulerFields {
    std::vector<double> x;
    std::vector<double> f, v, theta;
};

struct EulerResult {
    std::vector<double> times;
    std::vector<EulerFields> states;
    bool halted = false;
    std::string halt_reason;
    double halt_time = 0.0;
    EulerFields halt_state;  // dump at the failure step
};

// Method-of-lines RK4 for
//   df/dt     = -d(f v)/dx
//   dv/dt     = -v dv/dx - (1/m) dtheta/dx - (theta/m) d(ln f)/dx - K x / m
//   dtheta/dt = -v dtheta/dx - 2 theta dv/dx
// Advective derivatives switch to upwind when max|v| dt/dx > 0.3.
EulerResult euler_solve(const EulerFields& init, double mass, double binding,
                        double dt, std::span<const double> t_out,
                        Boundary bc = Boundary::Reflecting);

// Initial mean-displacement profiles for the micro/PDE comparison
struct DisplacementProfile {
    enum class Shape { None, Sine, GaussKink } shape = Shape::None;
    double amplitude = 0.0;  // in units of the spacing for Sine; absolute for GaussKink
    double wavelength = 0.0; // Sine
    double width = 0.0;      // GaussKink: density-pulse width
    double center = 0.0;     // GaussKink: pulse centre (site units)
};

struct MicroHydroScenario {
    ChainParams chain;              // finite, K = 0
    DisplacementProfile profile;
    double dq2 = 0.01, dp2 = 0.25;  // product-state widths
    double smear_width = 5.0;       // in length units
    double grid_dx = 0.5;           // field grid spacing
    double pde_cfl = 0.5;
};

struct CompareResult {
    std::vector<double> times;
    std::vector<double> l2_rel, linf_rel;
    std::vector<HydroFields> micro;
    std::vector<std::vector<double>> pde_n1;  // on the same grid
    std::vector<double> grid;
    double model_speed = 0.0;     // c = d nu / sqrt(m)
    double measured_speed = 0.0;  // from pulse centroid or mode frequency
    bool precondition_warning = false;
};

// Evolves the microscopic means, extracts n1(x,t), runs wave_solve from the
// same initial field, and reports relative L2/Linf errors per output time.
CompareResult compare_micro_hydro(const MicroHydroScenario& scenario,
                                  std::span<const double> t_out);

struct EquilibriumMetric {
    double time = 0.0;
    double sqp_rel = 0.0;       // max |s(q_j,p_j)| / sqrt(s_qq s_pp)
    double dp2_flatness = 0.0;  // max site-to-site relative deviation of dp_j^2
    double dist_eq = 0.0;       // relative distance from the equilibrium limits (NaN if K = 0)
};

std::vector<EquilibriumMetric> local_equilibrium_metric(
    std::span<const GaussianChainState> trajectory);

// first time all components fall below tol; NaN if never
double convergence_time(std::span<const EquilibriumMetric> metrics, double tol);

}  // namespace oscchain
