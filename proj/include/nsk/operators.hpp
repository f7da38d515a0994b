#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "densities.hpp"
#include "kernels.hpp"
#include "laplace.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace nsk {

// ---------------------------------------------------------------------------
// Differentiable inputs to the convolution operator
// ---------------------------------------------------------------------------

/// coef * z^exponent contribution to f'(z) as z -> 0+.
struct PowerTerm {
    double coef = 0.0;
    double exponent = 0.0;
};

/// A function together with the derivative the operator integrates against.
/// When f' carries non-integrable power terms at the origin (exponent <= -1,
/// as for the ML/IG densities), they are listed in `derivative_singular` and
/// `derivative_remainder` evaluates f' minus those terms with the cancellation
/// done analytically; the operator then treats the listed powers by analytic
/// continuation.  For smooth f the remainder is just f'.
struct DifferentiableFn {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> derivative_remainder;
    std::vector<PowerTerm> derivative_singular;
    double value_at_0 = std::numeric_limits<double>::quiet_NaN();
    // Coefficient of the x^0 component of the series around the origin.  When
    // a shape parameter hits an exact pole (nu(n+j) = 1 or rho n = 1) the
    // density carries a finite origin part on top of the divergent one; under
    // the analytic continuation the governing identities rely on, the operator picks
    // up the boundary term origin_constant * mu(x), which the classical
    // integral of the pointwise derivative does not see.
    double origin_constant = 0.0;

    static DifferentiableFn smooth(std::function<double(double)> f,
                                   std::function<double(double)> fprime, double f0) {
        DifferentiableFn d;
        d.value = std::move(f);
        d.derivative = std::move(fprime);
        d.derivative_remainder = d.derivative;
        d.value_at_0 = f0;
        return d;
    }

    /// Numeric fallback: central differences on f (step scaled to z).
    static DifferentiableFn from_function(std::function<double(double)> f) {
        auto fprime = [f](double z) {
            const double h = 1e-6 * std::max(std::abs(z), 1.0);
            return (f(z + h) - f(z - h)) / (2.0 * h);
        };
        double f0 = f(0.0);
        return smooth(f, fprime, f0);
    }
};

namespace detail {

// Finite-part value of int_0^x z^e mu(x - z) dz for a single power z^e with
// e in (-2, -1]; the analytic continuation x^{e+1}/(e+1) of the divergent
// piece is exact, the rest is an ordinary (endpoint-singular) integral:
//
//   FP int_0^x z^e mu(x-z) dz
//     = mu(x) x^{e+1}/(e+1) + int_0^x z^e (mu(x-z) - mu(x)) dz.
//
// Also valid for integrable powers e > -1.  e = -1 (logarithmic case) is
// rejected upstream.
inline double finite_part_power(const KernelSpec& spec, double coef, double e, double x,
                                const QuadratureConfig& q, const SeriesControl& ctl) {
    const double mu_x = spec.tail_levy_measure(x, ctl);
    // Near z = 0 the mu difference loses all digits to cancellation; the
    // midpoint form of int_{x-z}^x f_X is exact to O(z^3) there (the Levy
    // density equals the jump density, total mass 1).
    const double z_lin = 1e-4 * x;
    auto g = [&](double z) {
        if (z <= z_lin) return std::pow(z, e + 1.0) * spec.jump_density(x - 0.5 * z, ctl);
        return std::pow(z, e) * (spec.tail_levy_measure(x - z, ctl) - mu_x);
    };
    const double tail = integrate_endpoint_singular(g, 0.0, 0.5 * x, q) +
                        integrate_endpoint_singular(g, 0.5 * x, x, q);
    return coef * (mu_x * std::pow(x, e + 1.0) / (e + 1.0) + tail);
}

} // namespace detail

/// The convolution operator int_0^x f'(z) mu(x - z) dz with the kernel's tail
/// Levy measure (B(alpha) = 1 - alpha absorbed).  Non-integrable origin powers
/// of f', when declared, are handled by analytic continuation; the integrable
/// remainder goes through endpoint-aware quadrature split at x/2.
inline double apply_operator(const KernelSpec& spec, const DifferentiableFn& f, double x,
                             const QuadratureConfig& q = {}, const SeriesControl& ctl = {}) {
    if (!(x > 0.0)) throw std::domain_error("apply_operator: x must be > 0");
    double v = 0.0;
    for (const auto& p : f.derivative_singular) {
        if (p.coef == 0.0) continue;
        if (std::abs(p.exponent + 1.0) < 1e-9)
            throw std::invalid_argument(
                "apply_operator: logarithmic origin power (exponent -1) is not supported; "
                "perturb the kernel shape parameter");
        v += detail::finite_part_power(spec, p.coef, p.exponent, x, q, ctl);
    }
    auto g = [&](double z) {
        return f.derivative_remainder(z) * spec.tail_levy_measure(x - z, ctl);
    };
    v += integrate_endpoint_singular(g, 0.0, 0.5 * x, q);
    v += integrate_endpoint_singular(g, 0.5 * x, x, q);
    if (f.origin_constant != 0.0) v += f.origin_constant * spec.tail_levy_measure(x, ctl);
    return v;
}

/// Laplace transform of the operator.  With a finite origin value the
/// Caputo-style formula psi(eta) f~(eta) - psi(eta)/eta f(0) applies; when
/// f(0) is infinite (ML/IG densities) only the product form
/// L{f'} L{mu} = psi(eta) f~(eta) survives, the boundary term being absorbed
/// by analytic continuation.
inline double laplace_of_operator(const KernelSpec& spec, const std::function<double(double)>& f_transform,
                                  double f_at_0, double eta) {
    if (!(eta > 0.0)) throw std::domain_error("laplace_of_operator: eta must be > 0");
    const double psi = spec.bernstein_psi(eta);
    const double base = psi * f_transform(eta);
    if (std::isinf(f_at_0)) return base;
    return base - psi / eta * f_at_0;
}

/// Operator applied to the subordinator density, evaluated by Gaver-Stehfest
/// inversion of its closed transform.  Independent of the quadrature route;
/// used directly for kernels whose density has no closed series.
inline double apply_operator_via_transform(const KernelSpec& spec, double t, double x,
                                           int gs_terms = 16) {
    const bool finite_origin = spec.density_finite_at_origin();
    const double f0 = finite_origin ? spec.density_at_origin(t) : 0.0;
    // 50-digit transform evaluation keeps the inversion error smooth, so
    // residual checks can difference it in t without noise amplification
    auto fwd = [&](const float50& eta) {
        const float50 psi = spec.bernstein_psi_generic(eta);
        float50 v = psi * closed_form_transform_hp(spec, eta, t);
        if (finite_origin) v -= psi / eta * float50(f0);
        return v;
    };
    return gaver_stehfest_invert_hp(fwd, x, gs_terms);
}

// ---------------------------------------------------------------------------
// Analytic derivatives of the closed-form densities
// ---------------------------------------------------------------------------

namespace detail {

// ML density derivative, e^{-t} sum_n (kt)^n/n! x^{nu n - 2} E^n_{nu, nu n - 1}(-k x^nu),
// split into the declared singular powers (nu (n + j) <= 1) and the tail.
inline DifferentiableFn ml_differentiable(double k, double nu, double t,
                                          const SeriesControl& ctl) {
    DifferentiableFn d;
    d.value = [=](double x) { return density_ml(k, nu, x, t, ctl); };
    d.value_at_0 = std::numeric_limits<double>::infinity();

    auto deriv_from = [=](double x, bool skip_singular) {
        const double xnu = std::pow(x, nu);
        const double logkt = std::log(k * t);
        const double logx = std::log(x);
        return poisson_sum(t, ctl, [&](int n) {
            const int j_start = skip_singular ? std::max(0, static_cast<int>(std::floor(1.0 / nu - n)) + 1) : 0;
            return prabhakar_series(nu, nu * n - 1.0, static_cast<double>(n), -k * xnu, ctl,
                                    j_start,
                                    -t + n * logkt - std::lgamma(n + 1.0) + (nu * n - 2.0) * logx);
        });
    };
    d.derivative = [=](double x) { return deriv_from(x, false); };
    d.derivative_remainder = [=](double x) { return deriv_from(x, true); };

    for (int n = 1; nu * n <= 1.0; ++n) {
        double binom = 1.0; // (n)_j / j! = C(n+j-1, j)
        double kj = 1.0;    // (-k)^j
        for (int j = 0; nu * (n + j) <= 1.0; ++j) {
            const double s = nu * (n + j);
            const double rg = recip_gamma(s - 1.0); // exactly 0 when s = 1
            const double base =
                std::exp(-t + n * std::log(k * t) - std::lgamma(n + 1.0)) * binom * kj;
            if (rg != 0.0)
                d.derivative_singular.push_back({base * rg, s - 2.0});
            else if (s == 1.0)
                d.origin_constant += base; // x^0 component of the density (Gamma(1) = 1)
            binom *= static_cast<double>(n + j) / (j + 1.0);
            kj *= -k;
        }
    }
    return d;
}

// IG density derivative: -k f(x) + e^{-t-kx}/x^2 sum_n (k^rho t x^rho)^n / n! / Gamma(rho n - 1),
// the n with rho n <= 1 declared singular (their e^{-kx} is expanded so the
// subtraction is exact).
inline DifferentiableFn ig_differentiable(double k, double rho, double t,
                                          const SeriesControl& ctl) {
    DifferentiableFn d;
    d.value = [=](double x) { return density_ig(k, rho, x, t, ctl); };
    d.value_at_0 = std::numeric_limits<double>::infinity();

    const double logw0 = rho * std::log(k) + std::log(t);
    auto series_part = [=](double x, int mode) {
        // mode 0: full (times e^{-kx}); 1: singular rows times expm1(-kx);
        // 2: regular rows times e^{-kx}
        double sum = 0.0;
        int small_run = 0;
        const double logx = std::log(x);
        // log of the mode factor; expm1(-kx) < 0 flips the sign
        const double log_factor = mode == 1 ? std::log(-std::expm1(-k * x)) : -k * x;
        const double factor_sign = mode == 1 ? -1.0 : 1.0;
        for (int n = 1; n <= ctl.max_terms; ++n) {
            const bool singular = rho * n <= 1.0;
            double term = 0.0;
            if (mode == 0 || (mode == 1 && singular) || (mode == 2 && !singular)) {
                const LogRecipGamma lr = log_recip_gamma(rho * n - 1.0);
                if (lr.sign != 0) {
                    const double lt = -t + n * (logw0 + rho * logx) - std::lgamma(n + 1.0) -
                                      2.0 * logx + lr.log_abs + log_factor;
                    term = factor_sign * lr.sign * std::exp(lt);
                }
            }
            sum += term;
            if (n > t) {
                small_run = std::abs(term) < ctl.abs_tol ? small_run + 1 : 0;
                if (small_run >= 2) break;
            }
        }
        return sum;
    };
    d.derivative = [=](double x) {
        return -k * density_ig(k, rho, x, t, ctl) + series_part(x, 0);
    };
    d.derivative_remainder = [=](double x) {
        return -k * density_ig(k, rho, x, t, ctl) + series_part(x, 1) + series_part(x, 2);
    };
    for (int n = 1; rho * n <= 1.0; ++n) {
        const double rg = recip_gamma(rho * n - 1.0); // exactly 0 when rho n = 1
        const double base = std::exp(-t + n * logw0 - std::lgamma(n + 1.0));
        if (rg != 0.0)
            d.derivative_singular.push_back({base * rg, rho * n - 2.0});
        else if (rho * n == 1.0)
            d.origin_constant += base; // x^0 component of the density
    }
    return d;
}

// Two-point exponential mixture: smooth at the origin.  Uses
// d/dx [x^{n-1} E^j_{1,n}(c x)] = x^{n-2} E^j_{1,n-1}(c x).
inline DifferentiableFn two_point_exp_differentiable(double k1, double k2, double q1, double t,
                                                     const SeriesControl& ctl) {
    const double q2 = 1.0 - q1;
    DifferentiableFn d;
    d.value = [=](double x) { return density_two_point_exp(k1, k2, q1, x, t, ctl); };
    d.value_at_0 = t * std::exp(-t) * (q1 * k1 + q2 * k2);
    const double z = k2 - k1;
    const double r = q1 * k1 / (q2 * k2);
    d.derivative = [=](double x) {
        const double logw = std::log(q2 * k2 * t);
        const double logx = std::log(x);
        // inner_j C(n,j) r^j E^j_{1, n - shift}(z x), with the n-term's
        // prefactor folded into each Prabhakar evaluation
        auto inner = [&](int n, double beta_shift, double log_scale) {
            double s = 0.0, binom = 1.0, rj = 1.0;
            for (int j = 0; j <= n; ++j) {
                if (binom * rj > 0.0)
                    s += prabhakar_series(1.0, n - beta_shift, static_cast<double>(j), z * x, ctl,
                                          0, log_scale + std::log(binom * rj));
                binom *= static_cast<double>(n - j) / (j + 1.0);
                rj *= r;
            }
            return s;
        };
        const double sum = poisson_sum(t, ctl, [&](int n) {
            const double log_an = -t - k2 * x + n * logw - std::lgamma(n + 1.0);
            return inner(n, 1.0, log_an + (n - 2.0) * logx) -
                   k2 * inner(n, 0.0, log_an + (n - 1.0) * logx);
        });
        return sum;
    };
    d.derivative_remainder = d.derivative;
    return d;
}

// Two-point incomplete-gamma mixture: double series over (l, j) with
// s = rho1 l + rho2 j; rows with s <= 1 are the declared singular powers.
inline DifferentiableFn two_point_ig_differentiable(double k, double rho1, double rho2, double q1,
                                                    double t, const SeriesControl& ctl) {
    const double q2 = 1.0 - q1;
    DifferentiableFn d;
    d.value = [=](double x) { return density_two_point_ig(k, rho1, rho2, q1, x, t, ctl); };
    d.value_at_0 = std::numeric_limits<double>::infinity();

    const double cu = q1 * std::pow(k, rho1) * t;
    const double cy = q2 * std::pow(k, rho2) * t;

    // mode 0: full series (times e^{-kx}); 1: singular (l,j) times expm1(-kx);
    // 2: regular (l,j) times e^{-kx}.  Terms are cu^l cy^j / (l! j!)
    // 1/Gamma(s-1) x^{s-2} with s = rho1 l + rho2 j, assembled in log space.
    auto series_part = [=](double x, int mode) {
        const double logx = std::log(x);
        const double log_factor = mode == 1 ? std::log(-std::expm1(-k * x)) : -k * x;
        const double factor_sign = mode == 1 ? -1.0 : 1.0;
        const double log_cu = cu > 0.0 ? std::log(cu) : -std::numeric_limits<double>::infinity();
        const double log_cy = cy > 0.0 ? std::log(cy) : -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        int outer_small = 0;
        for (int l = 0; l <= ctl.max_terms; ++l) {
            if (l > 0 && cu == 0.0) break;
            double row = 0.0;
            int small_run = 0;
            for (int j = 0; j <= ctl.max_terms; ++j) {
                if (j > 0 && cy == 0.0) break;
                const double s = rho1 * l + rho2 * j;
                double term = 0.0;
                if (!(l == 0 && j == 0)) {
                    const bool singular = s <= 1.0;
                    if (mode == 0 || (mode == 1 && singular) || (mode == 2 && !singular)) {
                        const LogRecipGamma lr = log_recip_gamma(s - 1.0);
                        if (lr.sign != 0) {
                            const double lt = -t + (l == 0 ? 0.0 : l * log_cu) +
                                              (j == 0 ? 0.0 : j * log_cy) -
                                              std::lgamma(l + 1.0) - std::lgamma(j + 1.0) +
                                              (s - 2.0) * logx + lr.log_abs + log_factor;
                            term = factor_sign * lr.sign * std::exp(lt);
                        }
                    }
                }
                row += term;
                if (s > 1.5) {
                    small_run = std::abs(term) < ctl.abs_tol ? small_run + 1 : 0;
                    if (small_run >= 2) break;
                }
            }
            sum += row;
            outer_small = std::abs(row) < ctl.abs_tol ? outer_small + 1 : 0;
            if (outer_small >= 2) break;
        }
        return sum;
    };
    d.derivative = [=](double x) {
        return -k * density_two_point_ig(k, rho1, rho2, q1, x, t, ctl) + series_part(x, 0);
    };
    d.derivative_remainder = [=](double x) {
        return -k * density_two_point_ig(k, rho1, rho2, q1, x, t, ctl) + series_part(x, 1) +
               series_part(x, 2);
    };
    for (int l = 0; rho1 * l <= 1.0 && l < 64; ++l) {
        if (l > 0 && cu == 0.0) break;
        for (int j = (l == 0 ? 1 : 0); rho1 * l + rho2 * j <= 1.0; ++j) {
            if (j > 0 && cy == 0.0) break;
            const double s = rho1 * l + rho2 * j;
            const double rg = recip_gamma(s - 1.0); // exactly 0 when s = 1
            const double base = std::exp(-t + (l == 0 ? 0.0 : l * std::log(cu)) +
                                         (j == 0 ? 0.0 : j * std::log(cy)) -
                                         std::lgamma(l + 1.0) - std::lgamma(j + 1.0));
            if (rg != 0.0)
                d.derivative_singular.push_back({base * rg, s - 2.0});
            else if (s == 1.0)
                d.origin_constant += base; // x^0 component of the density
        }
    }
    return d;
}

// Exponential kernel: f' = k t e^{-kx-t} [k t W_{1,3}(kxt) - k W_{1,2}(kxt)].
inline DifferentiableFn exponential_differentiable(double k, double t, const SeriesControl& ctl) {
    DifferentiableFn d;
    d.value = [=](double x) { return density_exponential(k, x, t, ctl); };
    d.value_at_0 = k * t * std::exp(-t);
    d.derivative = [=](double x) {
        const double w = k * x * t;
        return k * t * std::exp(-k * x - t) *
               (k * t * wright_series(1.0, 3.0, w, ctl) - k * wright_series(1.0, 2.0, w, ctl));
    };
    d.derivative_remainder = d.derivative;
    return d;
}

} // namespace detail

/// The closed-form subordinator density at fixed t as a DifferentiableFn,
/// with the x-derivative supplied analytically (term-by-term differentiated
/// series) and its origin power structure declared.  Only kernels with a
/// closed-form density are supported.
inline DifferentiableFn differentiable_density(const KernelSpec& spec, double t,
                                               const SeriesControl& ctl = {}) {
    if (!(t > 0.0)) throw std::domain_error("differentiable_density: t must be > 0");
    switch (spec.family()) {
    case KernelFamily::exponential:
        return detail::exponential_differentiable(spec.k_alpha(), t, ctl);
    case KernelFamily::mittag_leffler:
        return detail::ml_differentiable(spec.k_alpha(), spec.nu(), t, ctl);
    case KernelFamily::incomplete_gamma:
        return detail::ig_differentiable(spec.k_alpha(), spec.rho(), t, ctl);
    case KernelFamily::distributed_exponential: {
        const auto ks = spec.component_k();
        if (spec.mixture().is_dirac())
            return detail::exponential_differentiable(ks[0], t, ctl);
        if (ks.size() == 2)
            return detail::two_point_exp_differentiable(ks[0], ks[1], spec.mixture().weights()[0],
                                                        t, ctl);
        break;
    }
    case KernelFamily::distributed_mittag_leffler:
        if (spec.mixture().is_dirac())
            return detail::ml_differentiable(spec.k_alpha(), spec.mixture().nodes()[0], t, ctl);
        break;
    case KernelFamily::distributed_incomplete_gamma: {
        const auto& mix = spec.mixture();
        if (mix.is_dirac())
            return detail::ig_differentiable(spec.k_alpha(), mix.nodes()[0], t, ctl);
        if (mix.nodes().size() == 2)
            return detail::two_point_ig_differentiable(spec.k_alpha(), mix.nodes()[0],
                                                       mix.nodes()[1], mix.weights()[0], t, ctl);
        break;
    }
    }
    throw std::domain_error(
        "differentiable_density: no closed-form density for this kernel (use the transform route)");
}

// ---------------------------------------------------------------------------
// Governing-equation residuals
// ---------------------------------------------------------------------------

/// One residual evaluation of d f/dt = -(D f)(x,t) + source(x,t).
struct ResidualReport {
    double x = 0.0;
    double t = 0.0;
    double lhs = 0.0;     // time derivative, central difference
    double rhs = 0.0;     // -(operator) + source
    double residual = 0.0; // lhs - rhs, exactly as computed
    double fd_step = 0.0;
};

/// Residual of the kernel's governing equation at an interior point (x, t),
/// using the matching closed-form density where one exists and the
/// transform-route evaluation otherwise.  fd_step <= 0 selects the default
/// 1e-4 max(t, 1).
inline ResidualReport governing_residual(const KernelSpec& spec, double x, double t,
                                         double fd_step = 0.0, const QuadratureConfig& q = {},
                                         const SeriesControl& ctl = {}, int gs_terms = 16) {
    if (!(x > 0.0) || !(t > 0.0))
        throw std::domain_error("governing_residual: interior point required (x, t > 0)");
    if (fd_step <= 0.0) fd_step = 1e-4 * std::max(t, 1.0);
    if (!(t - fd_step > 0.0))
        throw std::invalid_argument("governing_residual: fd stencil crosses t = 0");

    ResidualReport rep;
    rep.x = x;
    rep.t = t;
    rep.fd_step = fd_step;

    if (detail::has_closed_density(spec)) {
        const auto f_plus = differentiable_density(spec, t + fd_step, ctl);
        const auto f_minus = differentiable_density(spec, t - fd_step, ctl);
        const auto f_mid = differentiable_density(spec, t, ctl);
        rep.lhs = (f_plus.value(x) - f_minus.value(x)) / (2.0 * fd_step);
        rep.rhs = -apply_operator(spec, f_mid, x, q, ctl) + spec.source_term(x, t, ctl);
    } else {
        auto density_at = [&](double tt) {
            auto fwd = [&](const float50& eta) { return closed_form_transform_hp(spec, eta, tt); };
            return gaver_stehfest_invert_hp(fwd, x, gs_terms);
        };
        rep.lhs = (density_at(t + fd_step) - density_at(t - fd_step)) / (2.0 * fd_step);
        rep.rhs = -apply_operator_via_transform(spec, t, x, gs_terms) + spec.source_term(x, t, ctl);
    }
    rep.residual = rep.lhs - rep.rhs;
    return rep;
}

/// Outcome of the general-form equation check: either a residual report or a
/// documented refusal (the general form requires a finite origin value, which
/// the ML/IG families do not have).
struct GeneralEquationResult {
    std::optional<ResidualReport> report;
    std::string refusal;

    bool refused() const noexcept { return !report.has_value(); }
};

/// Residual of the general finite-activity equation
///   d f/dt = -(D f)(x,t) - mu(x) f(0,t) + f_X(x) e^{-t},
/// valid only for kernels whose density is finite at the origin (exponential
/// and distributed-exponential).  For the ML/IG families the Laplace formula
/// behind it does not apply and a typed refusal is returned instead.
inline GeneralEquationResult general_equation_check(const KernelSpec& spec, double x, double t,
                                                    double fd_step = 0.0,
                                                    const QuadratureConfig& q = {},
                                                    const SeriesControl& ctl = {},
                                                    int gs_terms = 16) {
    GeneralEquationResult result;
    if (!spec.density_finite_at_origin()) {
        result.refusal =
            "general form not applicable: the density is infinite at the origin for kernel '" +
            spec.id() + "', so the transform identity behind the general equation fails; "
            "use the kernel's own governing equation instead";
        return result;
    }
    if (!(x > 0.0) || !(t > 0.0))
        throw std::domain_error("general_equation_check: interior point required");
    if (fd_step <= 0.0) fd_step = 1e-4 * std::max(t, 1.0);
    if (!(t - fd_step > 0.0))
        throw std::invalid_argument("general_equation_check: fd stencil crosses t = 0");

    ResidualReport rep;
    rep.x = x;
    rep.t = t;
    rep.fd_step = fd_step;

    double op = 0.0;
    if (detail::has_closed_density(spec)) {
        const auto f_plus = differentiable_density(spec, t + fd_step, ctl);
        const auto f_minus = differentiable_density(spec, t - fd_step, ctl);
        const auto f_mid = differentiable_density(spec, t, ctl);
        rep.lhs = (f_plus.value(x) - f_minus.value(x)) / (2.0 * fd_step);
        op = apply_operator(spec, f_mid, x, q, ctl);
    } else {
        auto density_at = [&](double tt) {
            auto fwd = [&](const float50& eta) { return closed_form_transform_hp(spec, eta, tt); };
            return gaver_stehfest_invert_hp(fwd, x, gs_terms);
        };
        rep.lhs = (density_at(t + fd_step) - density_at(t - fd_step)) / (2.0 * fd_step);
        op = apply_operator_via_transform(spec, t, x, gs_terms);
    }
    rep.rhs = -op - spec.tail_levy_measure(x, ctl) * spec.density_at_origin(t) +
              spec.jump_density(x, ctl) * std::exp(-t);
    rep.residual = rep.lhs - rep.rhs;
    result.report = rep;
    return result;
}

} // namespace nsk
