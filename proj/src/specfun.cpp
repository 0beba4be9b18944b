#include "oscchain/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace oscchain::specfun {

namespace {

// Power series J_n(x) = sum_k (-1)^k (x/2)^{n+2k} / (k! (n+k)!), n >= 0.
// Safe for x < ~12: the largest term is bounded there, so cancellation
// stays below ~1e-12 absolute.
double series_j(int n, double x) {
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    const double h = 0.5 * x;
    double lt0 = n * std::log(h) - std::lgamma(n + 1.0);
    if (lt0 < -750.0) return 0.0;  // below double underflow
    double term = std::exp(lt0);
    double sum = term;
    const double h2 = h * h;
    for (int k = 0; k < 400; ++k) {
        term *= -h2 / ((k + 1.0) * (n + k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return sum;
}

// Start order for the downward recurrence. The seed's contamination by the
// growing (Y-type) solution decays like exp(-c delta^{3/2}/sqrt(x)) below the
// turning point, so the safety band must grow like x^{1/3}; 8 x^{1/3} + 36
// keeps it under 1e-20 through x = 1e4.
int miller_start(int n_max, double x) {
    double top = std::max(static_cast<double>(n_max), x);
    double margin = 36.0 + 8.0 * std::cbrt(std::max(x, 1.0));
    int m = static_cast<int>(top + margin);
    return m + (m % 2);
}

}  // namespace

std::vector<double> bessel_j_row(int n_max, double x) {
    if (n_max < 0) throw std::domain_error("bessel_j_row: n_max < 0");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw std::domain_error("bessel_j_row: x must be finite and >= 0");
    std::vector<double> row(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (x < 1e-280) {
        row[0] = 1.0;
        return row;
    }

    const int m = miller_start(n_max, x);
    std::vector<double> full(static_cast<std::size_t>(m) + 1, 0.0);

    // downward: J_{k-1} = (2k/x) J_k - J_{k+1}, seeded with (0, tiny)
    double jp = 0.0;     // J_{k+1} (unnormalised)
    double jc = 1e-300;  // J_k
    full[static_cast<std::size_t>(m)] = jc;
    for (int k = m; k >= 1; --k) {
        double jm = (2.0 * k / x) * jc - jp;
        jp = jc;
        jc = jm;
        full[static_cast<std::size_t>(k - 1)] = jc;
        if (std::abs(jc) > 1e250) {  // rescale before the recurrence overflows
            jc *= 1e-250;
            jp *= 1e-250;
            for (int i = k - 1; i <= m; ++i) full[static_cast<std::size_t>(i)] *= 1e-250;
        }
    }

    // Neumann normalisation: J_0 + 2 sum_{k>=1} J_{2k} = 1
    double norm = full[0];
    for (int k = 2; k <= m; k += 2) norm += 2.0 * full[static_cast<std::size_t>(k)];
    for (int k = 0; k <= n_max; ++k) row[static_cast<std::size_t>(k)] = full[static_cast<std::size_t>(k)] / norm;
    return row;
}

double bessel_j(int n, double x) {
    if (!(x >= 0.0) || !std::isfinite(x))
        throw std::domain_error("bessel_j: x must be finite and >= 0");
    int na = std::abs(n);
    double sign = (n < 0 && (na % 2) == 1) ? -1.0 : 1.0;  // J_{-n} = (-1)^n J_n
    if (x < 12.0) return sign * series_j(na, x);
    return sign * bessel_j_row(na, x)[static_cast<std::size_t>(na)];
}

std::vector<double> bessel_j_integral_row(int n_max, double x) {
    if (n_max < 0) throw std::domain_error("bessel_j_integral_row: n_max < 0");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw std::domain_error("bessel_j_integral_row: x must be finite and >= 0");
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (x == 0.0) return out;

    // One Bessel row covers both the odd-order Neumann sum for I_0 (terms
    // beyond order ~x decay super-exponentially) and the upward reduction
    // I_{n+1} = I_{n-1} - 2 J_n to order n_max.
    int need = std::max(n_max + 1, static_cast<int>(x) + 60);
    std::vector<double> j = bessel_j_row(need, x);

    double i0 = 0.0;
    int ktop = need - ((need % 2 == 0) ? 1 : 0);  // largest odd order <= need
    for (int k = ktop; k >= 1; k -= 2) i0 += j[static_cast<std::size_t>(k)];
    i0 *= 2.0;

    out[0] = i0;
    if (n_max >= 1) out[1] = 1.0 - j[0];
    for (int n = 2; n <= n_max; ++n)
        out[static_cast<std::size_t>(n)] = out[static_cast<std::size_t>(n - 2)] - 2.0 * j[static_cast<std::size_t>(n - 1)];
    return out;
}

double bessel_j_integral(int n, double x) {
    if (n < 0) throw std::domain_error("bessel_j_integral: n < 0");
    return bessel_j_integral_row(n, x)[static_cast<std::size_t>(n)];
}

}  // namespace oscchain::specfun
