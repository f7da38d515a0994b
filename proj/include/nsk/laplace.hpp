#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "kernels.hpp"
#include "quadrature.hpp"

namespace nsk {

using float50 = boost::multiprecision::cpp_bin_float_50;

namespace detail {

// Stehfest weights for an even number of terms, built once in 50-digit
// arithmetic.  The alternating binomial sums cancel catastrophically, so the
// whole weighted sum is also accumulated at this precision.
inline const std::vector<float50>& gs_coefficients(int terms) {
    static const std::map<int, std::vector<float50>> tables = [] {
        std::vector<float50> fact(49);
        fact[0] = 1;
        for (int i = 1; i <= 48; ++i) fact[i] = fact[i - 1] * i;
        std::map<int, std::vector<float50>> t;
        for (int n = 2; n <= 24; n += 2) {
            const int m = n / 2;
            std::vector<float50> a(n);
            for (int k = 1; k <= n; ++k) {
                float50 s = 0;
                for (int j = (k + 1) / 2; j <= std::min(k, m); ++j) {
                    float50 num = boost::multiprecision::pow(float50(j), m) * fact[2 * j];
                    float50 den = fact[m - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k];
                    s += num / den;
                }
                a[k - 1] = ((m + k) % 2 == 0 ? s : -s);
            }
            t[n] = std::move(a);
        }
        return t;
    }();
    auto it = tables.find(terms);
    if (it == tables.end())
        throw std::invalid_argument("gaver_stehfest: terms must be an even integer in [2, 24]");
    return it->second;
}

inline void validate_gs_args(double x, int terms) {
    if (!(x > 0.0)) throw std::domain_error("gaver_stehfest: x must be > 0");
    if (terms < 8 || terms > 20 || terms % 2 != 0)
        throw std::invalid_argument("gaver_stehfest: terms must be even and lie in [8, 20]");
}

} // namespace detail

/// Gaver-Stehfest inversion of a real-axis Laplace transform at x > 0.
/// `forward` is sampled at eta = k ln2 / x, k = 1..terms.
inline double gaver_stehfest_invert(const std::function<double(double)>& forward, double x,
                                    int terms = 16) {
    detail::validate_gs_args(x, terms);
    const auto& a = detail::gs_coefficients(terms);
    const double l2x = std::log(2.0) / x;
    float50 acc = 0;
    for (int k = 1; k <= terms; ++k) acc += a[k - 1] * float50(forward(k * l2x));
    return static_cast<double>(acc * float50(l2x));
}

/// As gaver_stehfest_invert, with the transform itself evaluated in 50-digit
/// arithmetic.  Removes the double-rounding noise floor (~1e-7 at 16 terms),
/// leaving the pure method error; use where better than 1e-6 is required and
/// the transform has a closed form.
template <typename F>
double gaver_stehfest_invert_hp(F&& forward_hp, double x, int terms = 20) {
    detail::validate_gs_args(x, terms);
    const auto& a = detail::gs_coefficients(terms);
    const float50 l2x = boost::multiprecision::log(float50(2)) / float50(x);
    float50 acc = 0;
    for (int k = 1; k <= terms; ++k) acc += a[k - 1] * forward_hp(k * l2x);
    return static_cast<double>(acc * l2x);
}

/// Agreement diagnostic across 8/12/16 terms; transforms that are not smooth
/// at x show up as disagreement beyond 1e-3 relative.
struct GsDiagnostic {
    double value = 0.0;
    double value_8 = 0.0;
    double value_12 = 0.0;
    double value_16 = 0.0;
    bool consistent = false;
};

inline GsDiagnostic gaver_stehfest_diagnose(const std::function<double(double)>& forward,
                                            double x) {
    GsDiagnostic d;
    d.value_8 = gaver_stehfest_invert(forward, x, 8);
    d.value_12 = gaver_stehfest_invert(forward, x, 12);
    d.value_16 = gaver_stehfest_invert(forward, x, 16);
    d.value = d.value_16;
    const double scale = std::max({std::abs(d.value_16), std::abs(d.value_12), 1e-300});
    d.consistent = std::abs(d.value_16 - d.value_12) <= 1e-3 * scale &&
                   std::abs(d.value_12 - d.value_8) <= 1e-3 * scale;
    return d;
}

/// Laplace transform of the absolutely continuous component of the
/// subordinator law: e^{-psi(eta) t} - e^{-t}.
inline double closed_form_transform(const KernelSpec& spec, double eta, double t) {
    if (!(eta > 0.0)) throw std::domain_error("closed_form_transform: eta must be > 0");
    if (t < 0.0) throw std::domain_error("closed_form_transform: t must be >= 0");
    return std::exp(-spec.bernstein_psi(eta) * t) - std::exp(-t);
}

/// closed_form_transform evaluated in 50-digit arithmetic, for use with
/// gaver_stehfest_invert_hp.
inline float50 closed_form_transform_hp(const KernelSpec& spec, const float50& eta, double t) {
    using boost::multiprecision::exp;
    return exp(-spec.bernstein_psi_generic(eta) * t) - exp(float50(-t));
}

/// Closed-form transform bundled with its kernel id, for cross-validation runs.
struct TransformPair {
    std::function<double(double)> forward;
    std::string label;
    double t = 0.0;
};

inline TransformPair transform_of(const KernelSpec& spec, double t) {
    TransformPair p;
    p.forward = [spec, t](double eta) { return closed_form_transform(spec, eta, t); };
    p.label = spec.id();
    p.t = t;
    return p;
}

/// Forward transform int_0^inf e^{-eta x} f(x) dx by quadrature.  eta = 0
/// computes the plain integral of f; `singular_origin` selects the
/// singularity-aware scheme for densities that blow up at x = 0.
inline double numeric_forward(const std::function<double(double)>& f, double eta,
                              bool singular_origin = false, const QuadratureConfig& q = {}) {
    if (eta < 0.0) throw std::domain_error("numeric_forward: eta must be >= 0");
    auto integrand = [&](double x) {
        const double damp = std::exp(-eta * x);
        return damp == 0.0 ? 0.0 : damp * f(x); // skip f where the weight underflows
    };
    return integrate_to_infinity(integrand, 0.0, q, singular_origin);
}

} // namespace nsk
