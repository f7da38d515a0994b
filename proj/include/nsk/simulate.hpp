#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "densities.hpp"
#include "kernels.hpp"
#include "parallel.hpp"

namespace nsk {

// ---------------------------------------------------------------------------
// Deterministic splittable RNG
// ---------------------------------------------------------------------------

/// (seed, stream_id) fully determines a stream; distinct stream_ids give
/// independent streams for parallel workers.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Name recorded in output metadata; the generator is fixed per build.
inline constexpr const char* kRngName = "xoshiro256++ / splitmix64 streams";

/// xoshiro256++ seeded through a SplitMix64 chain over (seed, stream_id).
/// Fully specified here, so sequences are bit-exact across builds; the
/// standard library's distributions are deliberately not used.
class Rng {
public:
    explicit Rng(RngSeed s) {
        std::uint64_t x = s.seed ^ (0x9E3779B97F4A7C15ULL * (s.stream_id + 1));
        bool all_zero = true;
        for (auto& w : state_) {
            w = splitmix64(x);
            all_zero = all_zero && w == 0;
        }
        if (all_zero) state_[0] = 0x1ULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

    /// Standard normal via the Marsaglia polar method (second value cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang; shapes below 1 boost the shape by
    /// one and apply the U^{1/shape} correction.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::domain_error("Rng::gamma: shape must be > 0");
        if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
        }
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// ---------------------------------------------------------------------------
// Jump sampling
// ---------------------------------------------------------------------------

/// Inverse-CDF map for the exponential jump law.
inline double exponential_jump_from_uniform(double u, double k) { return -std::log(u) / k; }

/// Exact Mittag-Leffler variate from two independent uniforms:
///   X = k^{-1/nu} (-ln u) (sin(nu pi)/tan(nu pi v) - cos(nu pi))^{1/nu},
/// the exponential-times-positive-stable factorization whose Laplace
/// transform is k/(eta^nu + k).
inline double ml_jump_from_uniforms(double u, double v, double k, double nu) {
    const double s = std::sin(nu * M_PI) / std::tan(nu * M_PI * v) - std::cos(nu * M_PI);
    return std::pow(k, -1.0 / nu) * (-std::log(u)) * std::pow(s, 1.0 / nu);
}

namespace detail {

inline double draw_mixture_param(const Mixture& mix, Rng& rng) {
    switch (mix.kind()) {
    case Mixture::Kind::dirac:
        return mix.nodes()[0];
    case Mixture::Kind::beta: {
        const double gr = rng.gamma(mix.beta_r());
        const double gs = rng.gamma(mix.beta_s());
        return gr / (gr + gs);
    }
    case Mixture::Kind::two_point:
    case Mixture::Kind::grid: {
        const double u = rng.uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i < mix.nodes().size(); ++i) {
            acc += mix.weights()[i];
            if (u < acc) return mix.nodes()[i];
        }
        return mix.nodes().back();
    }
    }
    return mix.nodes()[0];
}

} // namespace detail

/// One draw from the jump law of the kernel.  Distributed variants first draw
/// the parameter from the mixture, then the jump (the jump density is exactly
/// the mixture of component densities).
inline double sample_jump(const KernelSpec& spec, Rng& rng) {
    switch (spec.family()) {
    case KernelFamily::exponential:
        return exponential_jump_from_uniform(rng.uniform_open(), spec.k_alpha());
    case KernelFamily::mittag_leffler:
        return ml_jump_from_uniforms(rng.uniform_open(), rng.uniform_open(), spec.k_alpha(),
                                     spec.nu());
    case KernelFamily::incomplete_gamma:
        return rng.gamma(spec.rho()) / spec.k_alpha();
    case KernelFamily::distributed_exponential: {
        const double a = detail::draw_mixture_param(spec.mixture(), rng);
        return exponential_jump_from_uniform(rng.uniform_open(), a / (1.0 - a));
    }
    case KernelFamily::distributed_mittag_leffler: {
        const double nu = detail::draw_mixture_param(spec.mixture(), rng);
        return ml_jump_from_uniforms(rng.uniform_open(), rng.uniform_open(), spec.k_alpha(), nu);
    }
    case KernelFamily::distributed_incomplete_gamma: {
        const double rho = detail::draw_mixture_param(spec.mixture(), rng);
        return rng.gamma(rho) / spec.k_alpha();
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

/// One compound Poisson trajectory: unit-rate arrivals, i.i.d. positive jumps.
struct SamplePath {
    std::vector<double> jump_times; // strictly increasing, within [0, horizon]
    std::vector<double> jump_sizes; // strictly positive, same length
    double horizon = 0.0;

    /// Right-continuous running sum; 0 at t = 0.
    double value_at(double t) const {
        double v = 0.0;
        for (std::size_t i = 0; i < jump_times.size() && jump_times[i] <= t; ++i)
            v += jump_sizes[i];
        return v;
    }
};

inline SamplePath sample_path(const KernelSpec& spec, double horizon, RngSeed seed) {
    if (horizon < 0.0) throw std::domain_error("sample_path: horizon must be >= 0");
    SamplePath path;
    path.horizon = horizon;
    if (horizon == 0.0) return path;
    Rng rng(seed);
    double t = rng.exponential(1.0);
    while (t <= horizon) {
        path.jump_times.push_back(t);
        path.jump_sizes.push_back(sample_jump(spec, rng));
        t += rng.exponential(1.0);
    }
    return path;
}

/// Values S(t) over n paths; path i uses stream_id seed.stream_id + i, so the
/// result is a deterministic ordered reduction whatever the thread count.
inline std::vector<double> sample_values(const KernelSpec& spec, double t, int n_paths,
                                         RngSeed seed, int threads = 0) {
    if (n_paths < 1) throw std::invalid_argument("sample_values: n_paths must be >= 1");
    return parallel_map<double>(
        static_cast<std::size_t>(n_paths),
        [&](std::size_t i) {
            return sample_path(spec, t, {seed.seed, seed.stream_id + i}).value_at(t);
        },
        threads);
}

// ---------------------------------------------------------------------------
// Empirical-law comparison
// ---------------------------------------------------------------------------

struct KsResult {
    double statistic = 0.0; // one-sample KS against the conditional CDF
    int n_nonzero = 0;      // paths with at least one jump by t
};

/// One-sample Kolmogorov-Smirnov statistic between the nonzero values of S(t)
/// and the conditional distribution (int_0^y f)/(1 - e^{-t}).  The atom at
/// zero is conditioned away; the mixed law is never tested directly.
inline KsResult ks_compare(const KernelSpec& spec, double t, int n_paths, RngSeed seed,
                           const SeriesControl& ctl = {}, int threads = 0) {
    if (!(t > 0.0)) throw std::domain_error("ks_compare: t must be > 0");
    if (!detail::has_closed_density(spec))
        throw std::invalid_argument("ks_compare: closed-form density required for this check");

    std::vector<double> values = sample_values(spec, t, n_paths, seed, threads);
    std::vector<double> nonzero;
    nonzero.reserve(values.size());
    for (double v : values)
        if (v > 0.0) nonzero.push_back(v);
    if (static_cast<int>(nonzero.size()) < 100)
        throw std::runtime_error("ks_compare: fewer than 100 paths carry a jump; "
                                 "the statistic is refused at this sample size");
    std::sort(nonzero.begin(), nonzero.end());

    const SubordinatorLaw law = law_of(spec, t, ctl);
    const double mass = 1.0 - law.atom_mass;

    // cumulative quadrature of the density on a log-spaced grid, linear
    // interpolation of the CDF at the sample points
    const int cells = 2048;
    const double lo = nonzero.front() * 0.999;
    const double hi = nonzero.back() * 1.001;
    std::vector<double> grid(cells + 1), cdf(cells + 1);
    for (int i = 0; i <= cells; ++i)
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / cells);
    QuadratureConfig q;
    q.rel_tol = 1e-9;
    // first cell rescaled to [0,1]: the backend's error estimate is unreliable
    // on intervals this small even though the value is fine
    cdf[0] = integrate_endpoint_singular(
        [&](double u) { return law.density(lo * u) * lo; }, 0.0, 1.0, q);
    using gauss15 = boost::math::quadrature::gauss<double, 15>;
    for (int i = 1; i <= cells; ++i)
        cdf[i] = cdf[i - 1] + gauss15::integrate(law.density, grid[i - 1], grid[i]);

    auto conditional_cdf = [&](double y) {
        auto it = std::upper_bound(grid.begin(), grid.end(), y);
        if (it == grid.begin()) return cdf[0] / mass;
        if (it == grid.end()) return cdf[cells] / mass;
        const std::size_t j = static_cast<std::size_t>(it - grid.begin());
        const double w = (y - grid[j - 1]) / (grid[j] - grid[j - 1]);
        return (cdf[j - 1] + w * (cdf[j] - cdf[j - 1])) / mass;
    };

    const double m = static_cast<double>(nonzero.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < nonzero.size(); ++i) {
        const double fc = conditional_cdf(nonzero[i]);
        ks = std::max(ks, std::max((i + 1) / m - fc, fc - i / m));
    }
    return {ks, static_cast<int>(nonzero.size())};
}

/// Least-squares slope of log P(X > x) against log x over a log-spaced probe
/// grid; the Mittag-Leffler jump law has slope -nu over [10, 10^3].
inline double tail_slope(const std::vector<double>& draws, double x_lo, double x_hi,
                         int probes = 20) {
    std::vector<double> sorted(draws);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> lx, ls;
    for (int i = 0; i < probes; ++i) {
        const double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (probes - 1));
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        const double surv = (sorted.end() - it) / n;
        if (surv <= 0.0) break;
        lx.push_back(std::log(x));
        ls.push_back(std::log(surv));
    }
    if (lx.size() < 3) throw std::runtime_error("tail_slope: not enough tail mass to regress");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ls[i];
    }
    mx /= lx.size();
    my /= lx.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ls[i] - my);
    }
    return sxy / sxx;
}

} // namespace nsk
