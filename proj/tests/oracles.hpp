#pragma once

// Test-only oracles, independent of the library's evaluation paths: brute
// force partial sums in 50-digit arithmetic and quadrature of defining
// integrals.  Extended precision lives here and nowhere in the public API.

#include <cmath>
#include <functional>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <nsk/quadrature.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

/// Prabhakar partial sum in 50-digit arithmetic (rising factorial direct).
inline double prabhakar_big(double a, double b, double g, double x, int terms = 300) {
    big sum = 0, rising = 1, fact = 1;
    for (int j = 0; j < terms; ++j) {
        const big arg = big(a) * j + big(b);
        sum += boost::multiprecision::pow(big(x), j) * rising /
               (fact * boost::multiprecision::tgamma(arg));
        rising *= big(g) + j;
        fact *= j + 1;
    }
    return static_cast<double>(sum);
}

/// Wright partial sum in 50-digit arithmetic.
inline double wright_big(double a, double b, double x, int terms = 200) {
    big sum = 0, fact = 1;
    for (int j = 0; j < terms; ++j) {
        const big arg = big(a) * j + big(b);
        // skip the poles of Gamma, where 1/Gamma vanishes
        if (!(arg <= 0 && arg == boost::multiprecision::floor(arg)))
            sum += boost::multiprecision::pow(big(x), j) /
                   (fact * boost::multiprecision::tgamma(arg));
        fact *= j + 1;
    }
    return static_cast<double>(sum);
}

/// One-parameter Mittag-Leffler partial sum in 50-digit arithmetic.
inline double mittag_leffler_big(double nu, double x, int terms = 400) {
    big sum = 0;
    for (int j = 0; j < terms; ++j)
        sum += boost::multiprecision::pow(big(x), j) /
               boost::multiprecision::tgamma(big(nu) * j + 1);
    return static_cast<double>(sum);
}

/// erfc by adaptive quadrature of its defining integral.
inline double erfc_quadrature(double z) {
    auto integrand = [](double w) { return std::exp(-w * w); };
    return 2.0 / std::sqrt(M_PI) * nsk::integrate_to_infinity(integrand, z);
}

/// e^{z^2} erfc(z) in overflow-safe shifted form: (2/sqrt(pi)) int_0^inf e^{-u(u+2z)} du.
inline double scaled_erfc_quadrature(double z) {
    auto integrand = [z](double u) { return std::exp(-u * (u + 2.0 * z)); };
    return 2.0 / std::sqrt(M_PI) * nsk::integrate_to_infinity(integrand, 0.0);
}

/// Upper-incomplete gamma by quadrature of the defining integral.
inline double upper_inc_gamma_quadrature(double rho, double x) {
    auto integrand = [rho](double w) { return std::exp(-w) * std::pow(w, rho - 1.0); };
    nsk::QuadratureConfig q;
    q.rel_tol = 1e-12;
    if (x == 0.0) return nsk::integrate_to_infinity(integrand, 0.0, q, rho < 1.0);
    return nsk::integrate_to_infinity(integrand, x, q);
}

/// Compound Poisson density with Gamma(rho, rate k) jumps: the n-fold
/// convolutions are Gamma(n rho, k) in closed form, so the Poisson-weighted
/// sum is exact; this is the strongest oracle for the incomplete-gamma
/// kernel's density.
inline double gamma_convolution_density(double k, double rho, double x, double t, int terms = 30) {
    double sum = 0.0;
    for (int n = 1; n <= terms; ++n) {
        const double log_pdf =
            n * rho * std::log(k) + (n * rho - 1.0) * std::log(x) - k * x - std::lgamma(n * rho);
        sum += std::exp(-std::lgamma(n + 1.0) + n * std::log(t) + log_pdf);
    }
    return std::exp(-t) * sum;
}

} // namespace oracle
