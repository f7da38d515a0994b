#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <nsk/risk.hpp>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using nsk::KernelSpec;
using nsk::Mixture;
using nsk::NetProfitStatus;
using nsk::RiskConfig;

namespace {

RiskConfig config(double a, double beta, KernelSpec spec, double horizon = 10.0,
                  int n_paths = 10000) {
    RiskConfig cfg;
    cfg.a = a;
    cfg.beta = beta;
    cfg.spec = std::move(spec);
    cfg.horizon = horizon;
    cfg.n_paths = n_paths;
    return cfg;
}

} // namespace

TEST_CASE("net profit classification") {
    CHECK(nsk::net_profit_check(config(0, 2.0, KernelSpec::exponential(0.5))) ==
          NetProfitStatus::satisfied);
    CHECK(nsk::net_profit_check(config(0, 2.0, KernelSpec::mittag_leffler(0.5, 0.6))) ==
          NetProfitStatus::infinite_mean);
    CHECK(nsk::net_profit_check(config(0, 0.3, KernelSpec::incomplete_gamma(0.5, 0.5))) ==
          NetProfitStatus::violated);
    // the distributed-ML family is always discarded as well
    CHECK(nsk::net_profit_check(config(0, 5.0, KernelSpec::distributed_mittag_leffler(
                                                   0.5, Mixture::two_point(0.4, 0.5, 0.8, 0.5)))) ==
          NetProfitStatus::infinite_mean);
}

TEST_CASE("ruin probability edge cases") {
    // unreachable ruin at desk scale
    const auto safe = nsk::ruin_probability(config(1e6, 1.0, KernelSpec::exponential(0.5)), {1, 0});
    CHECK(safe.estimate == 0.0);
    CHECK(safe.half_width_95 == 0.0);

    // beta -> 0+: any jump ruins, so P(ruin) = 1 - e^{-horizon}
    const auto cfg = config(0.0, 1e-6, KernelSpec::exponential(0.5), 10.0, 20000);
    const auto est = nsk::ruin_probability(cfg, {2, 0});
    const double p = 1.0 - std::exp(-10.0);
    const double sigma = std::sqrt(p * (1.0 - p) / cfg.n_paths);
    CHECK_THAT(est.estimate, WithinAbs(p, 3.0 * sigma));
}

TEST_CASE("two independent runs agree within their intervals") {
    const auto cfg = config(0.0, 1.0, KernelSpec::exponential(0.5), 10.0, 100000);
    const auto run1 = nsk::ruin_probability(cfg, {101, 0});
    const auto run2 = nsk::ruin_probability(cfg, {202, 1000000});
    CHECK(std::abs(run1.estimate - run2.estimate) <
          run1.half_width_95 + run2.half_width_95);
    // and a re-run with the same seed is identical
    const auto rerun = nsk::ruin_probability(cfg, {101, 0});
    CHECK(rerun.estimate == run1.estimate);
}

TEST_CASE("ruin monotone in reserve and premium (coupled seeds)") {
    double prev_a = 1.0;
    for (double a : {0.0, 0.5, 2.0}) {
        const auto est =
            nsk::ruin_probability(config(a, 1.2, KernelSpec::exponential(0.5), 10.0, 20000),
                                  {77, 0});
        CHECK(est.estimate <= prev_a);
        prev_a = est.estimate;
    }
    double prev_b = 1.0;
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto est =
            nsk::ruin_probability(config(0.5, beta, KernelSpec::exponential(0.5), 10.0, 20000),
                                  {77, 0});
        CHECK(est.estimate <= prev_b);
        prev_b = est.estimate;
    }
}

TEST_CASE("closed-form moment generating function") {
    const auto cfg = config(1.0, 2.0, KernelSpec::exponential(0.5));
    // R(0) = a
    CHECK_THAT(nsk::mgf_R(cfg, 1.3, 0.0), WithinRel(std::exp(1.3 * 1.0), 1e-14));
    // eta -> 0+
    CHECK_THAT(nsk::mgf_R(cfg, 1e-8, 1.0), WithinAbs(1.0, 1e-6));
    // e^{eta(a + beta t)} e^{-psi t} at eta = 1, t = 1, k = 1: e^3 e^{-1/2}
    CHECK_THAT(nsk::mgf_R(cfg, 1.0, 1.0), WithinRel(std::exp(3.0) * std::exp(-0.5), 1e-14));
}

TEST_CASE("mgf against a Monte Carlo average") {
    const auto cfg = config(1.0, 2.0, KernelSpec::exponential(0.5));
    const double eta = 0.5, t = 1.0;
    const int n = 200000;
    const auto values = nsk::sample_values(cfg.spec, t, n, {303, 0});
    double sum = 0.0, sumsq = 0.0;
    for (double s : values) {
        const double v = std::exp(eta * (cfg.a + cfg.beta * t - s));
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK_THAT(nsk::mgf_R(cfg, eta, t), WithinAbs(mean, 3.0 * se));
}

TEST_CASE("reserve ode residual") {
    for (const auto& spec :
         {KernelSpec::exponential(0.5), KernelSpec::incomplete_gamma(0.5, 0.5)}) {
        const auto cfg = config(0.0, 1.0, spec);
        const double r = nsk::mgf_ode_residual(cfg, 1.0, 1.0, 1e-5);
        INFO(spec.id());
        CHECK(std::abs(r) < 1e-7);
        // second-order fd convergence
        const double r1 = nsk::mgf_ode_residual(cfg, 1.0, 1.0, 0.02);
        const double r2 = nsk::mgf_ode_residual(cfg, 1.0, 1.0, 0.01);
        CHECK(std::abs(r1 / r2) > 3.0);
        CHECK(std::abs(r1 / r2) < 5.0);
    }
    // stencil crossing t = 0 is rejected
    const auto cfg = config(0.0, 1.0, KernelSpec::exponential(0.5));
    CHECK_THROWS_AS(nsk::mgf_ode_residual(cfg, 1.0, 5e-6, 1e-5), std::invalid_argument);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config(-1.0, 1.0, KernelSpec::exponential(0.5)).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(config(0.0, 0.0, KernelSpec::exponential(0.5)).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(config(0.0, 1.0, KernelSpec::exponential(0.5), -2.0).validate(),
                    std::invalid_argument);
}
