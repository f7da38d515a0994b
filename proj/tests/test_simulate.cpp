#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include <nsk/simulate.hpp>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using nsk::KernelSpec;
using nsk::Mixture;
using nsk::Rng;
using nsk::RngSeed;

TEST_CASE("exponential inverse-cdf map") {
    CHECK_THAT(nsk::exponential_jump_from_uniform(0.5, 2.0),
               WithinAbs(std::log(2.0) / 2.0, 1e-15));
}

TEST_CASE("rng streams are deterministic and independent") {
    Rng a({42, 7}), b({42, 7}), c({42, 8});
    bool identical = true, distinct = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        identical = identical && va == b.next_u64();
        distinct = distinct || va != c.next_u64();
    }
    CHECK(identical);
    CHECK(distinct);
}

TEST_CASE("gamma sampler moments") {
    Rng rng({99, 0});
    const double shape = 0.5;
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gamma(shape);
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK_THAT(mean, WithinAbs(shape, 3.0 * std::sqrt(shape / n)));
    CHECK_THAT(var, WithinAbs(shape, 0.05));
}

TEST_CASE("incomplete-gamma jump mean") {
    // sample mean of the rho = 0.5 jump law matches rho/k within 3 SE
    const auto spec = KernelSpec::incomplete_gamma(0.5, 0.5); // k = 1
    Rng rng({2024, 0});
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = nsk::sample_jump(spec, rng);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK_THAT(mean, WithinAbs(0.5, 3.0 * se));
}

TEST_CASE("mittag-leffler jumps: exact sampler against the jump cdf") {
    const auto spec = KernelSpec::mittag_leffler(0.5, 0.6);
    Rng rng({7, 3});
    const int n = 20000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = nsk::sample_jump(spec, rng);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = spec.jump_cdf(draws[i]);
        ks = std::max(ks, std::max((i + 1.0) / n - f, f - static_cast<double>(i) / n));
    }
    CHECK(ks * std::sqrt(static_cast<double>(n)) < 1.63); // 1% critical value
}

TEST_CASE("mittag-leffler heavy tail") {
    const auto spec = KernelSpec::mittag_leffler(0.5, 0.6);
    Rng rng({11, 0});
    std::vector<double> draws(1000000);
    for (auto& d : draws) d = nsk::sample_jump(spec, rng);
    const double slope = nsk::tail_slope(draws, 10.0, 1000.0);
    CHECK_THAT(slope, WithinAbs(-0.6, 0.05));

    // diverging running mean (infinite-mean diagnostic): the prefix means over
    // n in {1e2,...,1e6} increase in at least 3 of the 4 decade steps
    double run = 0.0;
    std::vector<double> means;
    std::size_t next = 100;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        run += draws[i];
        if (i + 1 == next) {
            means.push_back(run / (i + 1));
            next *= 10;
        }
    }
    REQUIRE(means.size() == 5);
    int increases = 0;
    for (std::size_t i = 1; i < means.size(); ++i) increases += means[i] > means[i - 1];
    CHECK(increases >= 3);
}

TEST_CASE("sample paths") {
    const auto spec = KernelSpec::exponential(0.5);
    CHECK(nsk::sample_path(spec, 0.0, {1, 0}).jump_times.empty());

    const auto path = nsk::sample_path(spec, 10.0, {5, 1});
    for (std::size_t i = 1; i < path.jump_times.size(); ++i)
        CHECK(path.jump_times[i] > path.jump_times[i - 1]);
    for (double s : path.jump_sizes) CHECK(s > 0.0);
    CHECK(path.value_at(0.0) == 0.0);
    CHECK(path.value_at(10.0) ==
          std::accumulate(path.jump_sizes.begin(), path.jump_sizes.end(), 0.0));

    // reproducibility: identical seeds give identical paths
    const auto path2 = nsk::sample_path(spec, 10.0, {5, 1});
    REQUIRE(path2.jump_times.size() == path.jump_times.size());
    for (std::size_t i = 0; i < path.jump_times.size(); ++i) {
        CHECK(path.jump_times[i] == path2.jump_times[i]);
        CHECK(path.jump_sizes[i] == path2.jump_sizes[i]);
    }
}

TEST_CASE("zero-jump fraction matches the atom") {
    const auto spec = KernelSpec::exponential(0.5);
    for (double t : {0.5, 1.0, 2.0}) {
        const int n = 100000;
        const auto values = nsk::sample_values(spec, t, n, {31337, 0});
        int zeros = 0;
        for (double v : values) zeros += v == 0.0;
        const double p = std::exp(-t);
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        CHECK_THAT(static_cast<double>(zeros) / n, WithinAbs(p, 3.0 * sigma));
    }
}

TEST_CASE("mean of S(1) by the Wald identity") {
    // E S(t) = t E X for unit claim rate
    const auto spec = KernelSpec::exponential(0.5); // mean jump 1
    const int n = 1000000;
    const auto values = nsk::sample_values(spec, 1.0, n, {8, 0}, 4);
    double sum = 0.0, sumsq = 0.0;
    for (double v : values) {
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK_THAT(mean, WithinAbs(1.0, 3.0 * se));
}

TEST_CASE("parallel and serial reductions agree bit-exactly") {
    const auto spec = KernelSpec::incomplete_gamma(0.5, 0.5);
    const auto serial = nsk::sample_values(spec, 1.0, 5000, {17, 100}, 1);
    const auto parallel = nsk::sample_values(spec, 1.0, 5000, {17, 100}, 8);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);
}

TEST_CASE("distributed mixtures draw the parameter per jump") {
    const auto spec =
        KernelSpec::distributed_exponential(Mixture::two_point(0.5, 0.4, 0.75, 0.6));
    Rng rng({55, 0});
    const int n = 400000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = nsk::sample_jump(spec, rng);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK_THAT(mean, WithinAbs(spec.jump_mean(), 3.0 * se));
}

TEST_CASE("ks comparison against the conditional law") {
    for (const auto& spec :
         {KernelSpec::exponential(0.5), KernelSpec::incomplete_gamma(0.5, 0.5)}) {
        const auto ks = nsk::ks_compare(spec, 1.0, 100000, {123, 0});
        INFO(spec.id() << " ks=" << ks.statistic << " n=" << ks.n_nonzero);
        CHECK(ks.statistic * std::sqrt(static_cast<double>(ks.n_nonzero)) < 1.63);
    }
    // degenerate horizon: almost every path has no jumps; the statistic is refused
    CHECK_THROWS_AS(nsk::ks_compare(KernelSpec::exponential(0.5), 1e-8, 1000, {1, 0}),
                    std::runtime_error);
    // no closed-form density for a general mixture
    CHECK_THROWS_AS(nsk::ks_compare(KernelSpec::distributed_exponential(Mixture::beta(3.0, 2.0)),
                                    1.0, 1000, {1, 0}),
                    std::invalid_argument);
}
