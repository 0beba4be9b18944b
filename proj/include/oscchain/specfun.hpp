// Bessel-function kernel used by the chain propagators: values J_n(x),
// running integrals int_0^x J_n(y) dy, and whole-row evaluation so that a
// propagator table at one time costs a single downward-recurrence pass.
#pragma once

#include <vector>

namespace oscchain::specfun {

/// J_n(x) for integer n (any sign) and finite x >= 0.
/// Absolute error <= ~1e-13 for |n| <= 200, x <= 1e4.
/// Throws std::domain_error for negative or non-finite x.
double bessel_j(int n, double x);

/// J_0(x) .. J_{n_max}(x) in one pass (Miller downward recurrence with
/// Neumann-series normalisation). n_max >= 0.
std::vector<double> bessel_j_row(int n_max, double x);

/// int_0^x J_n(y) dy for n >= 0, x >= 0, via the exact reductions
///   I_1 = 1 - J_0(x),  I_{n+1} = I_{n-1} - 2 J_n(x),
///   I_0 = 2 * sum_{k>=0} J_{2k+1}(x).
/// Absolute error <= ~1e-12. Throws std::domain_error for x < 0 or n < 0.
double bessel_j_integral(int n, double x);

/// I_0(x) .. I_{n_max}(x) sharing one Bessel row.
std::vector<double> bessel_j_integral_row(int n_max, double x);

}  // namespace oscchain::specfun
