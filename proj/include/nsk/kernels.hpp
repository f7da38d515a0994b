#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "specfun.hpp"

namespace nsk {

namespace detail {

// Gauss-Legendre nodes and weights on (0,1); Newton iteration on P_n.
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
}

inline std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Jump density of the Mittag-Leffler law, k x^{nu-1} E_{nu,nu}(-k x^nu),
// across all scales: defining series while its cancellation is negligible,
// the completely monotone spectral integral in the middle band, and the
// large-argument expansion (power-law tail ~ nu x^{-nu-1}/(k Gamma(1-nu)))
// far out.
inline double ml_jump_density(double k, double nu, double x, const SeriesControl& ctl) {
    const double y = k * std::pow(x, nu);
    const double scale = std::pow(y, 1.0 / nu); // = k^{1/nu} x
    if (scale <= 8.0)
        return k * std::pow(x, nu - 1.0) * prabhakar_series(nu, nu, 1.0, -y, ctl);
    if (scale > 200.0)
        return k * std::pow(x, nu - 1.0) * prabhakar_asymptotic_neg(nu, nu, 1.0, y);
    const double cospi = std::cos(M_PI * nu);
    const double sinpi = std::sin(M_PI * nu);
    auto integrand = [=](double r) {
        const double rn = std::pow(r, nu);
        const double d1 = rn + k * cospi;
        const double damp = std::exp(-r * x);
        if (damp == 0.0) return 0.0;
        return r * damp * std::pow(r, nu - 1.0) / (d1 * d1 + k * k * sinpi * sinpi);
    };
    QuadratureConfig q;
    q.rel_tol = 1e-11;
    return sinpi / M_PI * k * integrate_to_infinity(integrand, 0.0, q, true);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Mixtures over a kernel parameter
// ---------------------------------------------------------------------------

/// Mixing law for a randomized kernel parameter, supported in (0,1).
/// Continuous (Beta) mixtures are discretized once, at construction, by
/// Gauss-Legendre quadrature; all consumers see a common nodes/weights view.
class Mixture {
public:
    enum class Kind { dirac, two_point, beta, grid };

    static Mixture dirac(double point) {
        require_open_unit(point, "Mixture::dirac point");
        Mixture m;
        m.kind_ = Kind::dirac;
        m.nodes_ = {point};
        m.weights_ = {1.0};
        return m;
    }

    static Mixture two_point(double p1, double w1, double p2, double w2) {
        require_open_unit(p1, "Mixture::two_point p1");
        require_open_unit(p2, "Mixture::two_point p2");
        if (!(p1 < p2))
            throw std::invalid_argument("Mixture::two_point requires p1 < p2");
        if (w1 < 0.0 || w1 > 1.0 || w2 < 0.0 || w2 > 1.0 || std::abs(w1 + w2 - 1.0) > 1e-12)
            throw std::invalid_argument("Mixture::two_point weights must lie in [0,1] and sum to 1");
        Mixture m;
        m.kind_ = Kind::two_point;
        m.nodes_ = {p1, p2};
        m.weights_ = {w1, w2};
        return m;
    }

    static Mixture beta(double r, double s, int quad_nodes = 64) {
        if (!(r > 0.0) || !(s > 0.0))
            throw std::invalid_argument("Mixture::beta requires r, s > 0");
        if (quad_nodes < 2)
            throw std::invalid_argument("Mixture::beta requires at least 2 quadrature nodes");
        Mixture m;
        m.kind_ = Kind::beta;
        m.beta_r_ = r;
        m.beta_s_ = s;
        std::vector<double> gl_nodes, gl_weights;
        detail::gauss_legendre_01(quad_nodes, gl_nodes, gl_weights);
        const double log_norm = std::lgamma(r) + std::lgamma(s) - std::lgamma(r + s);
        m.nodes_ = gl_nodes;
        m.weights_.resize(gl_nodes.size());
        for (std::size_t i = 0; i < gl_nodes.size(); ++i) {
            const double a = gl_nodes[i];
            m.weights_[i] = gl_weights[i] * std::exp((r - 1.0) * std::log(a) +
                                                     (s - 1.0) * std::log1p(-a) - log_norm);
        }
        return m;
    }

    static Mixture grid(std::vector<double> nodes, std::vector<double> weights) {
        if (nodes.empty() || nodes.size() != weights.size())
            throw std::invalid_argument("Mixture::grid requires matching non-empty nodes/weights");
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            require_open_unit(nodes[i], "Mixture::grid node");
            if (weights[i] < 0.0 || weights[i] > 1.0)
                throw std::invalid_argument("Mixture::grid weights must lie in [0,1]");
            sum += weights[i];
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("Mixture::grid weights must sum to 1");
        Mixture m;
        m.kind_ = Kind::grid;
        m.nodes_ = std::move(nodes);
        m.weights_ = std::move(weights);
        return m;
    }

    Kind kind() const noexcept { return kind_; }
    bool is_dirac() const noexcept { return kind_ == Kind::dirac; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double beta_r() const noexcept { return beta_r_; }
    double beta_s() const noexcept { return beta_s_; }

    double mean() const {
        if (kind_ == Kind::beta) return beta_r_ / (beta_r_ + beta_s_);
        double m = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) m += weights_[i] * nodes_[i];
        return m;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        switch (kind_) {
        case Kind::dirac:
            j = {{"kind", "dirac"}, {"point", nodes_[0]}};
            break;
        case Kind::two_point:
            j = {{"kind", "two_point"}, {"p1", nodes_[0]}, {"w1", weights_[0]},
                 {"p2", nodes_[1]}, {"w2", weights_[1]}};
            break;
        case Kind::beta:
            j = {{"kind", "beta"}, {"r", beta_r_}, {"s", beta_s_},
                 {"quad_nodes", static_cast<int>(nodes_.size())}};
            break;
        case Kind::grid:
            j = {{"kind", "grid"}, {"nodes", nodes_}, {"weights", weights_}};
            break;
        }
        return j;
    }

    static Mixture from_json(const nlohmann::json& j) {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "dirac") return dirac(j.at("point").get<double>());
        if (kind == "two_point")
            return two_point(j.at("p1").get<double>(), j.at("w1").get<double>(),
                             j.at("p2").get<double>(), j.at("w2").get<double>());
        if (kind == "beta")
            return beta(j.at("r").get<double>(), j.at("s").get<double>(),
                        j.value("quad_nodes", 64));
        if (kind == "grid")
            return grid(j.at("nodes").get<std::vector<double>>(),
                        j.at("weights").get<std::vector<double>>());
        throw std::invalid_argument("Mixture::from_json: unknown kind '" + kind + "'");
    }

    std::string tag() const {
        switch (kind_) {
        case Kind::dirac: return "dirac" + detail::format_param(nodes_[0]);
        case Kind::two_point:
            return "tp" + detail::format_param(nodes_[0]) + "-" + detail::format_param(nodes_[1]);
        case Kind::beta:
            return "beta" + detail::format_param(beta_r_) + "-" + detail::format_param(beta_s_);
        case Kind::grid: return "grid" + std::to_string(nodes_.size());
        }
        return "mix";
    }

private:
    static void require_open_unit(double v, const char* what) {
        if (!(v > 0.0) || !(v < 1.0))
            throw std::invalid_argument(std::string(what) + " must lie strictly in (0,1)");
    }

    Kind kind_ = Kind::dirac;
    double beta_r_ = 0.0, beta_s_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Kernel specification
// ---------------------------------------------------------------------------

enum class KernelFamily {
    exponential,
    mittag_leffler,
    incomplete_gamma,
    distributed_exponential,
    distributed_mittag_leffler,
    distributed_incomplete_gamma,
};

/// One non-singular kernel: the single source of truth for the tail Levy
/// measure, the Bernstein function, the jump law and the governing-equation
/// source term derived from it.  Immutable after construction.
///
/// Conventions fixed once here: the normalization B(alpha) = 1 - alpha is
/// absorbed, so the exponential kernel is exactly exp(-k_alpha x) with
/// k_alpha = alpha/(1-alpha); all kernels have unit total Levy mass.
class KernelSpec {
public:
    static KernelSpec exponential(double alpha) {
        KernelSpec s(KernelFamily::exponential, alpha);
        return s;
    }

    static KernelSpec mittag_leffler(double alpha, double nu) {
        KernelSpec s(KernelFamily::mittag_leffler, alpha);
        require_open_unit(nu, "nu"); // nu = 1 is representable only as the exponential variant
        s.shape_ = nu;
        return s;
    }

    static KernelSpec incomplete_gamma(double alpha, double rho) {
        KernelSpec s(KernelFamily::incomplete_gamma, alpha);
        require_open_unit(rho, "rho"); // rho = 1 likewise excluded
        s.shape_ = rho;
        return s;
    }

    static KernelSpec distributed_exponential(Mixture alpha_mix) {
        // admissibility: E k_alpha < infinity; for a Beta mixture this forces s > 1
        if (alpha_mix.kind() == Mixture::Kind::beta && !(alpha_mix.beta_s() > 1.0))
            throw std::invalid_argument(
                "distributed_exponential: Beta mixture requires s > 1 so that E[alpha/(1-alpha)] is finite");
        KernelSpec s;
        s.family_ = KernelFamily::distributed_exponential;
        s.mixture_ = std::move(alpha_mix);
        s.has_mixture_ = true;
        return s;
    }

    static KernelSpec distributed_mittag_leffler(double alpha, Mixture nu_mix) {
        KernelSpec s(KernelFamily::distributed_mittag_leffler, alpha);
        s.mixture_ = std::move(nu_mix);
        s.has_mixture_ = true;
        return s;
    }

    static KernelSpec distributed_incomplete_gamma(double alpha, Mixture rho_mix) {
        KernelSpec s(KernelFamily::distributed_incomplete_gamma, alpha);
        s.mixture_ = std::move(rho_mix);
        s.has_mixture_ = true;
        return s;
    }

    KernelFamily family() const noexcept { return family_; }

    double alpha() const {
        if (family_ == KernelFamily::distributed_exponential)
            throw std::logic_error("KernelSpec: alpha is mixture-valued for this variant");
        return alpha_;
    }

    double k_alpha() const {
        if (family_ == KernelFamily::distributed_exponential)
            throw std::logic_error("KernelSpec: k_alpha is mixture-valued for this variant");
        return k_alpha_;
    }

    double nu() const {
        if (family_ != KernelFamily::mittag_leffler)
            throw std::logic_error("KernelSpec: nu only applies to the Mittag-Leffler variant");
        return shape_;
    }

    double rho() const {
        if (family_ != KernelFamily::incomplete_gamma)
            throw std::logic_error("KernelSpec: rho only applies to the incomplete-gamma variant");
        return shape_;
    }

    const Mixture& mixture() const {
        if (!has_mixture_) throw std::logic_error("KernelSpec: no mixture for this variant");
        return mixture_;
    }

    bool distributed() const noexcept { return has_mixture_; }

    /// k values of the distributed-exponential components, k_i = a_i/(1-a_i).
    std::vector<double> component_k() const {
        const auto& mix = mixture();
        std::vector<double> ks(mix.nodes().size());
        for (std::size_t i = 0; i < ks.size(); ++i)
            ks[i] = mix.nodes()[i] / (1.0 - mix.nodes()[i]);
        return ks;
    }

    // -- derived quantities ---------------------------------------------------

    /// Tail Levy measure; mu(0) = 1 for every variant (unit mass, non-singular kernel).
    double tail_levy_measure(double x, const SeriesControl& ctl = {}) const {
        if (x < 0.0) throw std::domain_error("tail_levy_measure: x must be >= 0");
        switch (family_) {
        case KernelFamily::exponential:
            return std::exp(-k_alpha_ * x);
        case KernelFamily::mittag_leffler:
            return nsk::mittag_leffler(shape_, -k_alpha_ * std::pow(x, shape_), ctl);
        case KernelFamily::incomplete_gamma:
            return reg_upper_inc_gamma(shape_, k_alpha_ * x);
        case KernelFamily::distributed_exponential: {
            double v = 0.0;
            const auto ks = component_k();
            for (std::size_t i = 0; i < ks.size(); ++i)
                v += mixture_.weights()[i] * std::exp(-ks[i] * x);
            return v;
        }
        case KernelFamily::distributed_mittag_leffler: {
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i) {
                const double nu_i = mixture_.nodes()[i];
                v += mixture_.weights()[i] *
                     nsk::mittag_leffler(nu_i, -k_alpha_ * std::pow(x, nu_i), ctl);
            }
            return v;
        }
        case KernelFamily::distributed_incomplete_gamma: {
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i)
                v += mixture_.weights()[i] * reg_upper_inc_gamma(mixture_.nodes()[i], k_alpha_ * x);
            return v;
        }
        }
        return 0.0;
    }

    /// bernstein_psi over any real type (double, multiprecision floats);
    /// naive formulas, adequate wherever the working precision dominates the
    /// small-eta cancellation.
    template <typename Real>
    Real bernstein_psi_generic(Real eta) const {
        using std::pow;
        const Real one(1);
        switch (family_) {
        case KernelFamily::exponential:
            return eta / (eta + Real(k_alpha_));
        case KernelFamily::mittag_leffler: {
            const Real en = pow(eta, Real(shape_));
            return en / (en + Real(k_alpha_));
        }
        case KernelFamily::incomplete_gamma:
            return one - pow(Real(k_alpha_) / (eta + Real(k_alpha_)), Real(shape_));
        case KernelFamily::distributed_exponential: {
            Real v(0);
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i) {
                const Real k = Real(mixture_.nodes()[i]) / (one - Real(mixture_.nodes()[i]));
                v += Real(mixture_.weights()[i]) * eta / (eta + k);
            }
            return v;
        }
        case KernelFamily::distributed_mittag_leffler: {
            Real v(0);
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i) {
                const Real en = pow(eta, Real(mixture_.nodes()[i]));
                v += Real(mixture_.weights()[i]) * en / (en + Real(k_alpha_));
            }
            return v;
        }
        case KernelFamily::distributed_incomplete_gamma: {
            Real v(0);
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i)
                v += Real(mixture_.weights()[i]) *
                     (one - pow(Real(k_alpha_) / (eta + Real(k_alpha_)), Real(mixture_.nodes()[i])));
            return v;
        }
        }
        return Real(0);
    }

    /// Bernstein function psi(eta); psi(0+) = 0 and psi -> 1 as eta -> inf.
    double bernstein_psi(double eta) const {
        if (!(eta > 0.0)) throw std::domain_error("bernstein_psi: eta must be > 0");
        switch (family_) {
        case KernelFamily::exponential:
            return eta / (eta + k_alpha_);
        case KernelFamily::mittag_leffler: {
            const double en = std::pow(eta, shape_);
            return en / (en + k_alpha_);
        }
        case KernelFamily::incomplete_gamma:
            return -std::expm1(-shape_ * std::log1p(eta / k_alpha_));
        case KernelFamily::distributed_exponential: {
            double v = 0.0;
            const auto ks = component_k();
            for (std::size_t i = 0; i < ks.size(); ++i)
                v += mixture_.weights()[i] * eta / (eta + ks[i]);
            return v;
        }
        case KernelFamily::distributed_mittag_leffler: {
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i) {
                const double en = std::pow(eta, mixture_.nodes()[i]);
                v += mixture_.weights()[i] * en / (en + k_alpha_);
            }
            return v;
        }
        case KernelFamily::distributed_incomplete_gamma: {
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i)
                v += mixture_.weights()[i] *
                     -std::expm1(-mixture_.nodes()[i] * std::log1p(eta / k_alpha_));
            return v;
        }
        }
        return 0.0;
    }

    /// Density of one jump X; integrates to 1.  Diverges at the origin for the
    /// Mittag-Leffler and incomplete-gamma families, where x = 0 is rejected.
    double jump_density(double x, const SeriesControl& ctl = {}) const {
        switch (family_) {
        case KernelFamily::exponential:
            if (x < 0.0) throw std::domain_error("jump_density: x must be >= 0");
            return k_alpha_ * std::exp(-k_alpha_ * x);
        case KernelFamily::distributed_exponential: {
            if (x < 0.0) throw std::domain_error("jump_density: x must be >= 0");
            double v = 0.0;
            const auto ks = component_k();
            for (std::size_t i = 0; i < ks.size(); ++i)
                v += mixture_.weights()[i] * ks[i] * std::exp(-ks[i] * x);
            return v;
        }
        case KernelFamily::mittag_leffler:
            require_positive_x(x);
            return detail::ml_jump_density(k_alpha_, shape_, x, ctl);
        case KernelFamily::distributed_mittag_leffler: {
            require_positive_x(x);
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i)
                v += mixture_.weights()[i] *
                     detail::ml_jump_density(k_alpha_, mixture_.nodes()[i], x, ctl);
            return v;
        }
        case KernelFamily::incomplete_gamma:
            require_positive_x(x);
            return gamma_pdf(shape_, x);
        case KernelFamily::distributed_incomplete_gamma: {
            require_positive_x(x);
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i)
                v += mixture_.weights()[i] * gamma_pdf(mixture_.nodes()[i], x);
            return v;
        }
        }
        return 0.0;
    }

    /// Distribution function of one jump.
    double jump_cdf(double x, const SeriesControl& ctl = {}) const {
        if (x < 0.0) return 0.0;
        if (x == 0.0) return 0.0;
        switch (family_) {
        case KernelFamily::exponential:
            return -std::expm1(-k_alpha_ * x);
        case KernelFamily::distributed_exponential: {
            double v = 0.0;
            const auto ks = component_k();
            for (std::size_t i = 0; i < ks.size(); ++i)
                v += mixture_.weights()[i] * -std::expm1(-ks[i] * x);
            return v;
        }
        case KernelFamily::mittag_leffler:
            return 1.0 - nsk::mittag_leffler(shape_, -k_alpha_ * std::pow(x, shape_), ctl);
        case KernelFamily::distributed_mittag_leffler: {
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i) {
                const double nu_i = mixture_.nodes()[i];
                v += mixture_.weights()[i] *
                     (1.0 - nsk::mittag_leffler(nu_i, -k_alpha_ * std::pow(x, nu_i), ctl));
            }
            return v;
        }
        case KernelFamily::incomplete_gamma:
            return reg_lower_inc_gamma(shape_, k_alpha_ * x);
        case KernelFamily::distributed_incomplete_gamma: {
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i)
                v += mixture_.weights()[i] * reg_lower_inc_gamma(mixture_.nodes()[i], k_alpha_ * x);
            return v;
        }
        }
        return 0.0;
    }

    /// Mean jump size; +infinity for the Mittag-Leffler families (power-law tail).
    double jump_mean() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (family_) {
        case KernelFamily::exponential:
            return 1.0 / k_alpha_;
        case KernelFamily::mittag_leffler:
        case KernelFamily::distributed_mittag_leffler:
            return inf;
        case KernelFamily::incomplete_gamma:
            return shape_ / k_alpha_;
        case KernelFamily::distributed_exponential: {
            if (mixture_.kind() == Mixture::Kind::beta) {
                // E[(1-alpha)/alpha] = s/(r-1) for Beta(r,s), infinite when r <= 1
                if (!(mixture_.beta_r() > 1.0)) return inf;
                return mixture_.beta_s() / (mixture_.beta_r() - 1.0);
            }
            double v = 0.0;
            for (std::size_t i = 0; i < mixture_.nodes().size(); ++i)
                v += mixture_.weights()[i] * (1.0 - mixture_.nodes()[i]) / mixture_.nodes()[i];
            return v;
        }
        case KernelFamily::distributed_incomplete_gamma:
            return mixture_.mean() / k_alpha_;
        }
        return 0.0;
    }

    /// Inhomogeneous term of the governing equation for this kernel.  The
    /// exponential family carries the extra -t e^{-t} B_q(x) correction, with
    /// B_q(x) = [int k q][int e^{-k x} q]; the other families' term is
    /// e^{-t} times the jump density.
    double source_term(double x, double t, const SeriesControl& ctl = {}) const {
        if (t < 0.0) throw std::domain_error("source_term: t must be >= 0");
        const double base = std::exp(-t) * jump_density(x, ctl);
        if (family_ == KernelFamily::exponential)
            return base - t * std::exp(-t) * k_alpha_ * std::exp(-k_alpha_ * x);
        if (family_ == KernelFamily::distributed_exponential) {
            const auto ks = component_k();
            double mean_k = 0.0, mix_exp = 0.0;
            for (std::size_t i = 0; i < ks.size(); ++i) {
                mean_k += mixture_.weights()[i] * ks[i];
                mix_exp += mixture_.weights()[i] * std::exp(-ks[i] * x);
            }
            return base - t * std::exp(-t) * mean_k * mix_exp;
        }
        return base;
    }

    /// Value at the origin of the absolutely continuous density of the
    /// subordinator: t e^{-t} int k q (exponential family only; the other
    /// families diverge at the origin).
    double density_at_origin(double t) const {
        if (family_ == KernelFamily::exponential)
            return t * std::exp(-t) * k_alpha_;
        if (family_ == KernelFamily::distributed_exponential) {
            const auto ks = component_k();
            double mean_k = 0.0;
            for (std::size_t i = 0; i < ks.size(); ++i) mean_k += mixture_.weights()[i] * ks[i];
            return t * std::exp(-t) * mean_k;
        }
        throw std::domain_error("density_at_origin: density diverges at 0 for this kernel");
    }

    bool density_finite_at_origin() const noexcept {
        return family_ == KernelFamily::exponential ||
               family_ == KernelFamily::distributed_exponential;
    }

    // -- identification / serialization ---------------------------------------

    std::string id() const {
        using detail::format_param;
        switch (family_) {
        case KernelFamily::exponential:
            return "exp_a" + format_param(alpha_);
        case KernelFamily::mittag_leffler:
            return "ml_a" + format_param(alpha_) + "_nu" + format_param(shape_);
        case KernelFamily::incomplete_gamma:
            return "ig_a" + format_param(alpha_) + "_rho" + format_param(shape_);
        case KernelFamily::distributed_exponential:
            return "dexp_" + mixture_.tag();
        case KernelFamily::distributed_mittag_leffler:
            return "dml_a" + format_param(alpha_) + "_" + mixture_.tag();
        case KernelFamily::distributed_incomplete_gamma:
            return "dig_a" + format_param(alpha_) + "_" + mixture_.tag();
        }
        return "kernel";
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        switch (family_) {
        case KernelFamily::exponential:
            j = {{"variant", "exponential"}, {"alpha", alpha_}};
            break;
        case KernelFamily::mittag_leffler:
            j = {{"variant", "mittag_leffler"}, {"alpha", alpha_}, {"nu", shape_}};
            break;
        case KernelFamily::incomplete_gamma:
            j = {{"variant", "incomplete_gamma"}, {"alpha", alpha_}, {"rho", shape_}};
            break;
        case KernelFamily::distributed_exponential:
            j = {{"variant", "distributed_exponential"}, {"mixture", mixture_.to_json()}};
            break;
        case KernelFamily::distributed_mittag_leffler:
            j = {{"variant", "distributed_mittag_leffler"}, {"alpha", alpha_},
                 {"mixture", mixture_.to_json()}};
            break;
        case KernelFamily::distributed_incomplete_gamma:
            j = {{"variant", "distributed_incomplete_gamma"}, {"alpha", alpha_},
                 {"mixture", mixture_.to_json()}};
            break;
        }
        return j;
    }

    static KernelSpec from_json(const nlohmann::json& j) {
        const std::string variant = j.at("variant").get<std::string>();
        if (variant == "exponential") return exponential(j.at("alpha").get<double>());
        if (variant == "mittag_leffler")
            return mittag_leffler(j.at("alpha").get<double>(), j.at("nu").get<double>());
        if (variant == "incomplete_gamma")
            return incomplete_gamma(j.at("alpha").get<double>(), j.at("rho").get<double>());
        if (variant == "distributed_exponential")
            return distributed_exponential(Mixture::from_json(j.at("mixture")));
        if (variant == "distributed_mittag_leffler")
            return distributed_mittag_leffler(j.at("alpha").get<double>(),
                                              Mixture::from_json(j.at("mixture")));
        if (variant == "distributed_incomplete_gamma")
            return distributed_incomplete_gamma(j.at("alpha").get<double>(),
                                                Mixture::from_json(j.at("mixture")));
        throw std::invalid_argument("KernelSpec::from_json: unknown variant '" + variant + "'");
    }

private:
    KernelSpec() = default;

    KernelSpec(KernelFamily family, double alpha) : family_(family), alpha_(alpha) {
        require_open_unit(alpha, "alpha");
        k_alpha_ = alpha / (1.0 - alpha);
    }

    static void require_open_unit(double v, const char* name) {
        if (!(v > 0.0) || !(v < 1.0))
            throw std::invalid_argument(std::string("KernelSpec: ") + name +
                                        " must lie strictly in (0,1)");
    }

    void require_positive_x(double x) const {
        if (!(x > 0.0))
            throw std::domain_error(
                "jump_density: x must be > 0 (density has a singularity at the origin for this kernel)");
    }

    double gamma_pdf(double rho, double x) const {
        return std::exp(rho * std::log(k_alpha_) + (rho - 1.0) * std::log(x) - k_alpha_ * x -
                        std::lgamma(rho));
    }

    KernelFamily family_ = KernelFamily::exponential;
    double alpha_ = 0.0;
    double k_alpha_ = 0.0;
    double shape_ = 0.0; // nu or rho for the single-parameter variants
    bool has_mixture_ = false;
    Mixture mixture_ = Mixture::dirac(0.5);
};

/// Bernstein function of a kernel as a callable, tagged with its spec.
struct BernsteinPsi {
    KernelSpec spec;
    double operator()(double eta) const { return spec.bernstein_psi(eta); }
};

} // namespace nsk
