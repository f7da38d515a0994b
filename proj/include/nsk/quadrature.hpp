#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace nsk {

/// Settings for the numerical integration backends.  The adaptive scheme is
/// Gauss-Kronrod with interval bisection; endpoint singularities and
/// semi-infinite ranges use double-exponential (tanh-sinh / exp-sinh) rules.
struct QuadratureConfig {
    double rel_tol = 1e-9;
    int max_subdivisions = 15; // bisection depth resp. refinement levels

    void validate() const {
        if (!(rel_tol > 0.0))
            throw std::invalid_argument("QuadratureConfig: rel_tol must be > 0");
        if (max_subdivisions < 1)
            throw std::invalid_argument("QuadratureConfig: max_subdivisions must be >= 1");
    }
};

/// Raised when an integral's error estimate does not meet the requested
/// tolerance (relative to the L1 norm, so cancellation-heavy integrands are
/// judged on the achievable scale).
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double error_estimate)
        : std::runtime_error(what + format_detail(value, error_estimate)),
          value_(value),
          error_estimate_(error_estimate) {}

    double value() const noexcept { return value_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    static std::string format_detail(double value, double err) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), " (value %.9g, error estimate %.3e)", value, err);
        return buf;
    }

    double value_;
    double error_estimate_;
};

namespace detail {

inline void check_estimate(const char* where, double value, double err, double l1,
                           const QuadratureConfig& q) {
    // the backends' error estimates are conservative; a small slack factor
    // keeps borderline-converged results while still flagging divergence.
    // tiny integrals are never held below an absolute floor of 1e-12.
    const double scale = std::max({std::abs(value), l1, 1e-300});
    if (!std::isfinite(value) || (err > 10.0 * q.rel_tol * scale && err > 1e-12))
        throw QuadratureError(std::string(where) + ": tolerance not met", value, err);
}

} // namespace detail

/// Adaptive Gauss-Kronrod on a finite interval; integrand smooth in the interior.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& q = {}) {
    q.validate();
    if (a == b) return 0.0;
    double err = 0.0, l1 = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, static_cast<unsigned>(q.max_subdivisions), q.rel_tol, &err, &l1);
    detail::check_estimate("integrate_adaptive", v, err, l1, q);
    return v;
}

/// tanh-sinh rule for integrable endpoint singularities on [a, b].
template <typename F>
double integrate_endpoint_singular(F&& f, double a, double b, const QuadratureConfig& q = {}) {
    q.validate();
    if (a == b) return 0.0;
    boost::math::quadrature::tanh_sinh<double> rule(static_cast<std::size_t>(q.max_subdivisions));
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    double v = rule.integrate(std::forward<F>(f), a, b, q.rel_tol, &err, &l1, &levels);
    detail::check_estimate("integrate_endpoint_singular", v, err, l1, q);
    return v;
}

/// Integral over [a, +inf).  The head segment [a, a+1] goes through tanh-sinh
/// (absorbing any left-endpoint singularity, in value or derivative); the
/// tail is mapped to (0, 1] by x = (a+1)/u, which handles exponential and
/// algebraic decay alike.  `singular_origin` documents caller intent; the
/// scheme is singularity-aware either way.
template <typename F>
double integrate_to_infinity(F&& f, double a, const QuadratureConfig& q = {},
                             bool singular_origin = false) {
    (void)singular_origin;
    q.validate();
    const double split = a + 1.0;
    const double head = integrate_endpoint_singular(f, a, split, q);
    auto mapped = [&](double u) {
        const double x = split / u;
        if (!std::isfinite(x)) return 0.0;
        const double fx = f(x);
        if (fx == 0.0) return 0.0; // avoid 0 * inf from the Jacobian
        return fx * x * (x / split);
    };
    const double tail = integrate_endpoint_singular(mapped, 0.0, 1.0, q);
    return head + tail;
}

} // namespace nsk
