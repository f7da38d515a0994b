#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "quadrature.hpp"
#include "series.hpp"

namespace nsk {

// ---------------------------------------------------------------------------
// Gamma helpers
// ---------------------------------------------------------------------------

/// Sign/log decomposition of 1/Gamma(z); sign == 0 encodes an exact zero
/// (z a non-positive integer).
struct LogRecipGamma {
    double log_abs;
    int sign;
};

inline LogRecipGamma log_recip_gamma(double z) {
    if (z > 0.5) return {-std::lgamma(z), +1};
    // reflection: 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    if (z == std::nearbyint(z)) return {-std::numeric_limits<double>::infinity(), 0};
    const double s = std::sin(M_PI * z);
    return {std::log(std::abs(s)) + std::lgamma(1.0 - z) - std::log(M_PI), s > 0.0 ? +1 : -1};
}

/// 1/Gamma(z) as an entire function: exactly 0 at z = 0, -1, -2, ...
inline double recip_gamma(double z) {
    const LogRecipGamma lr = log_recip_gamma(z);
    return lr.sign == 0 ? 0.0 : lr.sign * std::exp(lr.log_abs);
}

namespace detail {

// Workhorse for Prabhakar-type sums
//
//   e^{log_scale} sum_{j >= j_start} x^j (g)_j / (j! Gamma(a j + b)),
//
// assembled in log space with sign tracking; the rising factorial is
// accumulated incrementally.  Requirements: a > 0, g >= 0; b may be any real
// (1/Gamma vanishes at the non-positive integers).  g == 0 leaves only the
// j = 0 term, matching the empty rising product.  log_scale lets callers fold
// an external prefactor into each term so that huge/tiny factors never meet
// outside the exponential.
inline double prabhakar_series(double a, double b, double g, double x, const SeriesControl& ctl,
                               int j_start = 0, double log_scale = 0.0) {
    ctl.validate();
    if (x == 0.0) return j_start == 0 ? recip_gamma(b) * std::exp(log_scale) : 0.0;

    const double log_abs_x = std::log(std::abs(x));
    const int sign_x = x < 0.0 ? -1 : +1;

    double sum = 0.0;
    double log_rising = 0.0; // log (g)_j
    double log_fact = 0.0;   // log j!
    double prev_abs = std::numeric_limits<double>::infinity();
    int small_run = 0;

    for (int j = 0; j <= ctl.max_terms; ++j) {
        if (j >= j_start) {
            double term = 0.0;
            const LogRecipGamma lr = log_recip_gamma(a * j + b);
            if (lr.sign != 0 && log_rising != -std::numeric_limits<double>::infinity()) {
                const double lt = log_scale + j * log_abs_x + log_rising - log_fact + lr.log_abs;
                if (lt > 700.0) throw SeriesError("prabhakar series term overflow", sum, j);
                term = lr.sign * ((sign_x < 0 && (j & 1)) ? -1.0 : 1.0) * std::exp(lt);
            }
            sum += term;
            // stop once past the pole region of 1/Gamma(a j + b): two
            // consecutive small terms plus a geometric bound on the tail
            // (slowly decaying alternating series would otherwise leave a
            // tail many times the last term)
            if (a * j + b > 1.0) {
                const double mag = std::abs(term);
                bool tail_ok = mag == 0.0;
                if (!tail_ok && mag < prev_abs) {
                    const double r = mag / prev_abs;
                    tail_ok = mag * r / (1.0 - r) < ctl.abs_tol;
                }
                small_run = (mag < ctl.abs_tol && tail_ok) ? small_run + 1 : 0;
                if (small_run >= 2) return sum;
                prev_abs = std::max(mag, 1e-300);
            }
        }
        log_rising += std::log(g + j);
        log_fact += std::log(static_cast<double>(j + 1));
    }
    throw SeriesError("prabhakar series did not converge", sum, ctl.max_terms);
}

// e^{log_scale} sum_{j >= j_start} x^j / (j! Gamma(a j + b)) for the Wright function.
inline double wright_series(double a, double b, double x, const SeriesControl& ctl,
                            int j_start = 0, double log_scale = 0.0) {
    ctl.validate();
    if (x == 0.0) return j_start == 0 ? recip_gamma(b) * std::exp(log_scale) : 0.0;
    const double log_abs_x = std::log(std::abs(x));
    const int sign_x = x < 0.0 ? -1 : +1;
    double sum = 0.0;
    double log_fact = 0.0;
    double prev_abs = std::numeric_limits<double>::infinity();
    int small_run = 0;
    for (int j = 0; j <= ctl.max_terms; ++j) {
        if (j >= j_start) {
            double term = 0.0;
            const LogRecipGamma lr = log_recip_gamma(a * j + b);
            if (lr.sign != 0) {
                const double lt = log_scale + j * log_abs_x - log_fact + lr.log_abs;
                if (lt > 700.0) throw SeriesError("wright series term overflow", sum, j);
                term = lr.sign * ((sign_x < 0 && (j & 1)) ? -1.0 : 1.0) * std::exp(lt);
            }
            sum += term;
            if (a * j + b > 1.0) {
                const double mag = std::abs(term);
                bool tail_ok = mag == 0.0;
                if (!tail_ok && mag < prev_abs) {
                    const double r = mag / prev_abs;
                    tail_ok = mag * r / (1.0 - r) < ctl.abs_tol;
                }
                small_run = (mag < ctl.abs_tol && tail_ok) ? small_run + 1 : 0;
                if (small_run >= 2) return sum;
                prev_abs = std::max(mag, 1e-300);
            }
        }
        log_fact += std::log(static_cast<double>(j + 1));
    }
    throw SeriesError("wright series did not converge", sum, ctl.max_terms);
}

// Large-argument expansion of E^g_{a,b}(-y), y > 0:
//
//   sum_{m>=0} (-1)^m (g)_m / m!  y^{-g-m} / Gamma(b - a (g + m)),
//
// truncated at the smallest term.  The expansion is asymptotic (the
// reciprocal-Gamma factors eventually grow superexponentially); the
// optimal-truncation remainder is exponentially small in y^{1/a}, which is
// exactly the regime where the defining series has lost all its digits.
inline double prabhakar_asymptotic_neg(double a, double b, double g, double y) {
    const double logy = std::log(y);
    constexpr int kMax = 220;
    double terms[kMax];
    double log_mags[kMax];
    double log_rising = 0.0, log_fact = 0.0;
    for (int m = 0; m < kMax; ++m) {
        const LogRecipGamma lr = log_recip_gamma(b - a * (g + m));
        const double lt = log_rising - log_fact - (g + m) * logy +
                          (lr.sign == 0 ? -std::numeric_limits<double>::infinity() : lr.log_abs);
        log_mags[m] = lt;
        terms[m] = lr.sign == 0
                       ? 0.0
                       : ((m & 1) ? -1.0 : 1.0) * lr.sign * std::exp(std::min(lt, 700.0));
        log_rising += std::log(g + m);
        log_fact += std::log(static_cast<double>(m + 1));
    }
    // optimal truncation: stop where the magnitude envelope bottoms out.  The
    // reciprocal-Gamma factors pass through zeros, so a 3-term window is used
    // to see past the pole dips.
    int best = kMax - 3;
    double best_env = std::numeric_limits<double>::infinity();
    for (int m = 0; m + 2 < kMax; ++m) {
        const double env = std::max({log_mags[m], log_mags[m + 1], log_mags[m + 2]});
        if (env < best_env) {
            best_env = env;
            best = m;
        }
    }
    double sum = 0.0;
    for (int m = 0; m < best; ++m) sum += terms[m];
    return sum;
}

// E^g_{a,b}(-y) for y >= 0 across all scales: defining series while its
// cancellation stays within double precision, large-argument expansion beyond.
inline double prabhakar_neg_arg(double a, double b, double g, double y,
                                const SeriesControl& ctl) {
    if (y == 0.0) return recip_gamma(b);
    if (std::pow(y, 1.0 / a) <= 20.0) return prabhakar_series(a, b, g, -y, ctl);
    return prabhakar_asymptotic_neg(a, b, g, y);
}

// Spectral representation of E_nu(-y) for nu in (0,1), y > 0:
//
//   E_nu(-y) = (sin(nu pi)/pi) int_0^inf r^{nu-1} e^{-r y^{1/nu}}
//              / ((r^nu + cos(nu pi))^2 + sin^2(nu pi)) dr.
//
// Used for large y where the alternating series cancels catastrophically.
inline double mittag_leffler_spectral(double nu, double y) {
    const double c = std::pow(y, 1.0 / nu);
    const double cospi = std::cos(M_PI * nu);
    const double sinpi = std::sin(M_PI * nu);
    auto integrand = [=](double r) {
        const double rn = std::pow(r, nu);
        const double d1 = rn + cospi;
        return std::pow(r, nu - 1.0) * std::exp(-r * c) / (d1 * d1 + sinpi * sinpi);
    };
    QuadratureConfig q;
    q.rel_tol = 1e-11;
    return sinpi / M_PI * integrate_to_infinity(integrand, 0.0, q, /*singular_origin=*/true);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// One-parameter Mittag-Leffler function E_nu(x) = sum_j x^j / Gamma(nu j + 1)
/// for nu in (0,1].  Negative arguments switch to the completely monotone
/// spectral representation once the series' cancellation scale exceeds double
/// precision (direct series only for |x| <= 5 and |x|^{1/nu} <= 8).
inline double mittag_leffler(double nu, double x, const SeriesControl& ctl = {}) {
    if (!(nu > 0.0) || nu > 1.0)
        throw std::domain_error("mittag_leffler: nu must lie in (0,1]");
    if (nu == 1.0) return std::exp(x);
    if (x >= 0.0) return detail::prabhakar_series(nu, 1.0, 1.0, x, ctl);
    const double y = -x;
    if (y <= 5.0 && std::pow(y, 1.0 / nu) <= 8.0)
        return detail::prabhakar_series(nu, 1.0, 1.0, x, ctl);
    return detail::mittag_leffler_spectral(nu, y);
}

/// Prabhakar (three-parameter Mittag-Leffler) function
/// E^g_{a,b}(x) = sum_j x^j (g)_j / (j! Gamma(a j + b)), a, b, g > 0.
inline double prabhakar(double a, double b, double g, double x, const SeriesControl& ctl = {}) {
    if (!(a > 0.0) || !(b > 0.0) || !(g > 0.0))
        throw std::domain_error("prabhakar: alpha, beta, gamma must be > 0");
    return detail::prabhakar_series(a, b, g, x, ctl);
}

/// Wright function W_{a,b}(x) = sum_j x^j / (j! Gamma(a j + b)), a > -1.
inline double wright(double a, double b, double x, const SeriesControl& ctl = {}) {
    if (!(a > -1.0)) throw std::domain_error("wright: a must be > -1");
    return detail::wright_series(a, b, x, ctl);
}

/// Upper-incomplete gamma function Gamma(rho; x) = int_x^inf e^{-w} w^{rho-1} dw
/// for rho > 0, x >= 0.  Continued fraction for x > rho + 1, complement of the
/// lower series otherwise.
inline double upper_inc_gamma(double rho, double x) {
    if (!(rho > 0.0)) throw std::domain_error("upper_inc_gamma: rho must be > 0");
    if (x < 0.0) throw std::domain_error("upper_inc_gamma: x must be >= 0");
    if (x == 0.0) return std::tgamma(rho);

    if (x <= rho + 1.0) {
        // lower series: gamma(rho, x) = x^rho e^{-x} sum_n x^n / (rho (rho+1)...(rho+n))
        double ap = rho;
        double del = 1.0 / rho;
        double sum = del;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16)
                return std::tgamma(rho) - sum * std::exp(-x + rho * std::log(x));
        }
        throw SeriesError("upper_inc_gamma: lower series did not converge", sum, 1000);
    }

    // modified Lentz continued fraction for Q(rho, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - rho;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - rho);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            return h * std::exp(-x + rho * std::log(x));
    }
    throw SeriesError("upper_inc_gamma: continued fraction did not converge", h, 1000);
}

/// Regularized upper-incomplete gamma Q(rho, x) = Gamma(rho; x)/Gamma(rho).
inline double reg_upper_inc_gamma(double rho, double x) {
    return upper_inc_gamma(rho, x) / std::tgamma(rho);
}

/// Regularized lower-incomplete gamma P(rho, x) = 1 - Q(rho, x), computed on
/// the series side for small x to avoid cancellation.
inline double reg_lower_inc_gamma(double rho, double x) {
    if (!(rho > 0.0)) throw std::domain_error("reg_lower_inc_gamma: rho must be > 0");
    if (x < 0.0) throw std::domain_error("reg_lower_inc_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x <= rho + 1.0) {
        double ap = rho;
        double del = 1.0 / rho;
        double sum = del;
        for (int n = 0; n < 1000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16)
                return sum * std::exp(-x + rho * std::log(x) - std::lgamma(rho));
        }
        throw SeriesError("reg_lower_inc_gamma: series did not converge", sum, 1000);
    }
    return 1.0 - reg_upper_inc_gamma(rho, x);
}

} // namespace nsk
