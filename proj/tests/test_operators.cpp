#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <nsk/operators.hpp>

#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using nsk::KernelSpec;
using nsk::Mixture;

namespace {

// Laplace transform of the series (uf2): the operator applied to the
// exponential-kernel density, in closed form.
double ll4_closed(double k, double t, double eta) {
    return eta / (eta + k) *
               (std::exp(-eta * t / (eta + k)) - std::exp(-t)) -
           k * t * std::exp(-t) / (eta + k);
}

// (uf2) series value at (x, t)
double uf2_series(double k, double t, double x) {
    double s1 = 0.0, s2 = 0.0;
    for (int n = 1; n <= 40; ++n) {
        const double w = n * std::log(k * t * x);
        s1 += std::exp(w - std::lgamma(n + 1.0) - std::lgamma(n + 2.0));
        s2 += std::exp(w - 2.0 * std::lgamma(n + 1.0));
    }
    return k * t * std::exp(-t - k * x) * s1 - k * std::exp(-t - k * x) * s2;
}

} // namespace

TEST_CASE("operator on elementary functions") {
    const auto spec = KernelSpec::exponential(0.5); // k = 1
    const auto constant = nsk::DifferentiableFn::smooth([](double) { return 4.2; },
                                                        [](double) { return 0.0; }, 4.2);
    CHECK_THAT(nsk::apply_operator(spec, constant, 1.7), WithinAbs(0.0, 1e-12));

    const auto linear =
        nsk::DifferentiableFn::smooth([](double z) { return z; }, [](double) { return 1.0; }, 0.0);
    CHECK_THAT(nsk::apply_operator(spec, linear, 1.0), WithinAbs(1.0 - std::exp(-1.0), 1e-10));
}

TEST_CASE("operator on the exponential-kernel density matches the closed series") {
    const auto spec = KernelSpec::exponential(0.5);
    const auto f = nsk::differentiable_density(spec, 1.0);
    for (double x : {0.5, 1.0, 2.0})
        CHECK_THAT(nsk::apply_operator(spec, f, x), WithinAbs(uf2_series(1.0, 1.0, x), 1e-9));
}

TEST_CASE("operator linearity on smooth functions") {
    const auto spec = KernelSpec::incomplete_gamma(0.5, 0.5);
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    auto f = nsk::DifferentiableFn::smooth([](double z) { return std::sin(z); },
                                           [](double z) { return std::cos(z); }, 0.0);
    auto g = nsk::DifferentiableFn::smooth([](double z) { return std::exp(-z); },
                                           [](double z) { return -std::exp(-z); }, 1.0);
    for (int i = 0; i < 5; ++i) {
        const double a = coef(gen), b = coef(gen);
        auto combo = nsk::DifferentiableFn::smooth(
            [=](double z) { return a * std::sin(z) + b * std::exp(-z); },
            [=](double z) { return a * std::cos(z) - b * std::exp(-z); }, b);
        const double lhs = nsk::apply_operator(spec, combo, 1.3);
        const double rhs =
            a * nsk::apply_operator(spec, f, 1.3) + b * nsk::apply_operator(spec, g, 1.3);
        CHECK_THAT(lhs, WithinAbs(rhs, 1e-9));
    }
}

TEST_CASE("laplace factorization of the operator") {
    // L{D f}(eta) = L{f'}(eta) L{mu}(eta) for smooth f = 1 - e^{-x}
    const auto spec = KernelSpec::mittag_leffler(0.5, 0.6);
    auto f = nsk::DifferentiableFn::smooth([](double z) { return 1.0 - std::exp(-z); },
                                           [](double z) { return std::exp(-z); }, 0.0);
    const double eta = 1.0;
    auto op_of_x = [&](double x) { return nsk::apply_operator(spec, f, x); };
    nsk::QuadratureConfig q;
    q.rel_tol = 1e-8;
    const double lhs = nsk::numeric_forward(op_of_x, eta, false, q);
    const double rhs = 1.0 / (eta + 1.0) * spec.bernstein_psi(eta) / eta;
    CHECK_THAT(lhs, WithinAbs(rhs, 1e-6));
}

TEST_CASE("laplace_of_operator dispatch") {
    const auto spec = KernelSpec::exponential(0.5); // k = 1
    // constant function: psi f~ - psi/eta f(0) = 0
    auto ft_const = [](double eta) { return 1.0 / eta; };
    CHECK_THAT(nsk::laplace_of_operator(spec, ft_const, 1.0, 2.0), WithinAbs(0.0, 1e-15));

    // exponential-kernel density at t: closed form (ll4)
    const double t = 1.0;
    auto ft = [&](double eta) { return nsk::closed_form_transform(spec, eta, t); };
    for (double eta : {0.5, 1.0, 3.0})
        CHECK_THAT(nsk::laplace_of_operator(spec, ft, spec.density_at_origin(t), eta),
                   WithinAbs(ll4_closed(1.0, t, eta), 1e-14));

    // ML kernel, product form (ll3): psi f~
    const auto ml = KernelSpec::mittag_leffler(0.5, 0.5);
    auto ft_ml = [&](double eta) { return nsk::closed_form_transform(ml, eta, t); };
    const double eta = 2.0;
    const double en = std::pow(eta, 0.5);
    const double ll3 = en / (en + 1.0) * (std::exp(-en / (en + 1.0) * t) - std::exp(-t));
    CHECK_THAT(nsk::laplace_of_operator(ml, ft_ml, std::numeric_limits<double>::infinity(), eta),
               WithinAbs(ll3, 1e-14));
}

TEST_CASE("governing residuals at interior points") {
    const auto exp_rep = nsk::governing_residual(KernelSpec::exponential(0.5), 1.0, 1.0, 1e-4);
    CHECK(std::abs(exp_rep.residual) < 1e-6);
    CHECK(exp_rep.residual == exp_rep.lhs - exp_rep.rhs);

    // rho = 0.5 exercises the exact-pole coefficient (rho n = 1 at n = 2)
    const auto ig_rep = nsk::governing_residual(KernelSpec::incomplete_gamma(0.5, 0.5), 1.0, 1.0);
    CHECK(std::abs(ig_rep.residual) < 1e-5);

    const auto ml_rep = nsk::governing_residual(KernelSpec::mittag_leffler(0.5, 0.6), 1.0, 1.0);
    CHECK(std::abs(ml_rep.residual) < 1e-5);

    // large x: every term decays like e^{-k x} (k = 3 here)
    const auto far = nsk::governing_residual(KernelSpec::exponential(0.75), 20.0, 1.0);
    CHECK(std::abs(far.residual) < 1e-8);
    CHECK(std::abs(far.lhs) < 1e-8);
    CHECK(std::abs(far.rhs) < 1e-8);
    CHECK(std::abs(KernelSpec::exponential(0.75).source_term(20.0, 1.0)) < 1e-8);
}

TEST_CASE("residual second-order fd convergence") {
    for (const auto& spec : {KernelSpec::exponential(0.5), KernelSpec::mittag_leffler(0.5, 0.6),
                             KernelSpec::incomplete_gamma(0.5, 0.6)}) {
        const double r1 = nsk::governing_residual(spec, 1.0, 1.0, 0.08).residual;
        const double r2 = nsk::governing_residual(spec, 1.0, 1.0, 0.04).residual;
        INFO(spec.id() << " r(0.08)=" << r1 << " r(0.04)=" << r2);
        CHECK(std::abs(r1 / r2) > 3.0);
        CHECK(std::abs(r1 / r2) < 5.0);
    }
}

TEST_CASE("fd stencil crossing zero is rejected") {
    CHECK_THROWS_AS(nsk::governing_residual(KernelSpec::exponential(0.5), 1.0, 5e-5, 1e-4),
                    std::invalid_argument);
}

TEST_CASE("general-form equation") {
    const auto exp_res = nsk::general_equation_check(KernelSpec::exponential(0.5), 1.0, 1.0);
    REQUIRE_FALSE(exp_res.refused());
    CHECK(std::abs(exp_res.report->residual) < 1e-6);

    const auto tp = KernelSpec::distributed_exponential(Mixture::two_point(0.5, 0.4, 0.75, 0.6));
    const auto tp_res = nsk::general_equation_check(tp, 0.5, 2.0);
    REQUIRE_FALSE(tp_res.refused());
    CHECK(std::abs(tp_res.report->residual) < 1e-5);

    const auto ml_res = nsk::general_equation_check(KernelSpec::mittag_leffler(0.5, 0.5), 1.0, 1.0);
    CHECK(ml_res.refused());
    CHECK(ml_res.refusal.find("infinite at the origin") != std::string::npos);
    const auto ig_res =
        nsk::general_equation_check(KernelSpec::incomplete_gamma(0.5, 0.5), 1.0, 1.0);
    CHECK(ig_res.refused());
}

TEST_CASE("nu = 1 anomaly: the two operator paths differ by the boundary term") {
    const double k = 1.0, t = 1.0;
    const auto expk = KernelSpec::exponential(0.5);
    const auto ml_near = KernelSpec::mittag_leffler(0.5, 1.0 - 1e-8);
    auto ft = [&](double eta) { return nsk::closed_form_transform(expk, eta, t); };
    for (double eta : {0.7, 1.5, 4.0}) {
        const double v_ml = nsk::laplace_of_operator(ml_near, ft,
                                                     std::numeric_limits<double>::infinity(), eta);
        const double v_exp = nsk::laplace_of_operator(expk, ft, expk.density_at_origin(t), eta);
        CHECK_THAT(v_ml - v_exp, WithinAbs(k * t * std::exp(-t) / (eta + k), 1e-4));
        // the exponential path reproduces the transform of the (uf2) series
        CHECK_THAT(v_exp, WithinAbs(ll4_closed(k, t, eta), 1e-7));
    }
    // the analogous rho-case gap carries the same extra term
    const auto ig_near = KernelSpec::incomplete_gamma(0.5, 1.0 - 1e-8);
    for (double eta : {0.7, 1.5, 4.0}) {
        const double v_ig = nsk::laplace_of_operator(ig_near, ft,
                                                     std::numeric_limits<double>::infinity(), eta);
        const double v_exp = nsk::laplace_of_operator(expk, ft, expk.density_at_origin(t), eta);
        CHECK_THAT(v_ig - v_exp, WithinAbs(k * t * std::exp(-t) / (eta + k), 1e-4));
    }
}

TEST_CASE("transform-route operator agrees with quadrature where both apply") {
    for (const auto& spec : {KernelSpec::exponential(0.5), KernelSpec::mittag_leffler(0.5, 0.6),
                             KernelSpec::incomplete_gamma(0.5, 0.6)}) {
        const auto f = nsk::differentiable_density(spec, 1.0);
        for (double x : {0.7, 1.5}) {
            const double quad = nsk::apply_operator(spec, f, x);
            const double inv = nsk::apply_operator_via_transform(spec, 1.0, x);
            INFO(spec.id() << " x=" << x);
            CHECK_THAT(quad, WithinAbs(inv, 1e-6));
        }
    }
}

TEST_CASE("analytic derivatives match central differences away from the origin") {
    for (const auto& spec :
         {KernelSpec::exponential(0.5), KernelSpec::mittag_leffler(0.5, 0.6),
          KernelSpec::incomplete_gamma(0.5, 0.6),
          KernelSpec::distributed_exponential(Mixture::two_point(0.5, 0.4, 0.75, 0.6)),
          KernelSpec::distributed_incomplete_gamma(0.5, Mixture::two_point(0.3, 0.5, 0.6, 0.5))}) {
        const auto f = nsk::differentiable_density(spec, 1.0);
        for (double x : {0.5, 1.2}) {
            const double h = 1e-5;
            const double fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
            INFO(spec.id() << " x=" << x);
            CHECK_THAT(f.derivative(x), WithinAbs(fd, 1e-6 * std::max(1.0, std::abs(fd))));
        }
    }
}

TEST_CASE("derivative remainder equals derivative minus declared powers") {
    const auto spec = KernelSpec::mittag_leffler(0.5, 0.6);
    const auto f = nsk::differentiable_density(spec, 1.0);
    REQUIRE_FALSE(f.derivative_singular.empty());
    for (double x : {0.3, 0.9}) {
        double powers = 0.0;
        for (const auto& p : f.derivative_singular) powers += p.coef * std::pow(x, p.exponent);
        CHECK_THAT(f.derivative_remainder(x),
                   WithinAbs(f.derivative(x) - powers, 1e-9 * std::max(1.0, std::abs(powers))));
    }
}
