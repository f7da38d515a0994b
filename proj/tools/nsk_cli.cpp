// nsk command-line front-end: batch evaluation of densities, governing
// residuals, Laplace cross-checks, Monte Carlo runs and the risk-reserve
// application.  Every command emits CSV/JSON suitable for plotting and CI;
// exit code 0 means all requested checks passed their tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <nsk/nsk.hpp>

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

json build_info() {
    return {{"name", "nsk"}, {"version", kVersion}, {"compiler", __VERSION__}};
}

/// Manifest embedded in (or written beside) every output file.
json make_manifest(const std::string& command, const json& params) {
    json m;
    m["command"] = command;
    m["parameters"] = params;
    m["build"] = build_info();
    m["timestamp"] = timestamp_utc();
    return m;
}

nsk::KernelSpec parse_kernel(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw CLI::ValidationError("--kernel", "cannot read file " + arg.substr(1));
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return nsk::KernelSpec::from_json(json::parse(text));
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--kernel", e.what());
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void write_manifest_beside(const std::string& csv_path, const json& manifest) {
    write_file(csv_path + ".manifest.json", manifest.dump(2) + "\n");
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    return vals;
}

/// Closed transform matching the law a kernel's density command evaluates.
/// The distributed Mittag-Leffler series is the q-average of single-nu laws,
/// so its reference transform is the q-average of their transforms.
std::function<double(double)> reference_transform(const nsk::KernelSpec& spec, double t) {
    if (spec.family() == nsk::KernelFamily::distributed_mittag_leffler &&
        !spec.mixture().is_dirac()) {
        const double k = spec.k_alpha();
        const nsk::Mixture mix = spec.mixture();
        return [k, mix, t](double eta) {
            return nsk::distributed_ml_series_transform(k, mix, eta, t);
        };
    }
    return [spec, t](double eta) { return nsk::closed_form_transform(spec, eta, t); };
}

/// 50-digit version of the reference transform, for the checked inversion.
std::function<nsk::float50(const nsk::float50&)> reference_transform_hp(
    const nsk::KernelSpec& spec, double t) {
    if (spec.family() == nsk::KernelFamily::distributed_mittag_leffler &&
        !spec.mixture().is_dirac()) {
        const double k = spec.k_alpha();
        const nsk::Mixture mix = spec.mixture();
        return [k, mix, t](const nsk::float50& eta) {
            using boost::multiprecision::exp;
            using boost::multiprecision::pow;
            nsk::float50 v(0);
            for (std::size_t i = 0; i < mix.nodes().size(); ++i) {
                const nsk::float50 en = pow(eta, nsk::float50(mix.nodes()[i]));
                v += nsk::float50(mix.weights()[i]) * exp(-en / (en + k) * t);
            }
            return v - exp(nsk::float50(-t));
        };
    }
    return [spec, t](const nsk::float50& eta) {
        return nsk::closed_form_transform_hp(spec, eta, t);
    };
}

bool singular_at_origin(const nsk::KernelSpec& spec) { return !spec.density_finite_at_origin(); }

// ---------------------------------------------------------------------------

int cmd_density(const nsk::KernelSpec& spec, double t, double x_min, double x_max, int points,
                bool linear, bool cross_check, double tol, const std::string& out,
                const std::string& json_out, int threads) {
    const nsk::SubordinatorLaw law = nsk::law_of(spec, t);
    if (points < 2) throw CLI::ValidationError("--points", "need at least 2");
    if (!linear && !(x_min > 0.0))
        throw CLI::ValidationError("--x-min", "geometric grid requires x-min > 0 (or --linear)");
    std::vector<double> grid_x(points);
    for (int i = 0; i < points; ++i) {
        const double u = static_cast<double>(i) / (points - 1);
        grid_x[i] = linear ? x_min + u * (x_max - x_min)
                           : x_min * std::pow(x_max / x_min, u);
    }
    const auto computed = nsk::parallel_map<double>(
        grid_x.size(), [&](std::size_t i) { return law.density(grid_x[i]); }, threads);

    std::ostringstream csv;
    csv << "x,density,t,kernel_id\r\n";
    for (std::size_t i = 0; i < grid_x.size(); ++i)
        csv << fmt17(grid_x[i]) << "," << fmt17(computed[i]) << "," << fmt17(t) << "," << spec.id()
            << "\r\n";

    json params = {{"kernel", spec.to_json()}, {"t", t},      {"x_min", x_min},
                   {"x_max", x_max},           {"points", points}, {"grid", linear ? "linear" : "geometric"},
                   {"cross_check", cross_check}, {"tol", tol}};
    json manifest = make_manifest("density", params);

    int rc = 0;
    if (cross_check) {
        auto fwd = reference_transform_hp(spec, t);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid_x.size(); ++i) {
            if (grid_x[i] < nsk::kGsMinX && singular_at_origin(spec)) continue;
            const double inv = nsk::gaver_stehfest_invert_hp(fwd, grid_x[i], 20);
            const double rel = std::abs(inv - computed[i]) /
                               std::max(std::abs(computed[i]), 1e-12);
            worst = std::max(worst, rel);
        }
        manifest["cross_check_max_rel_error"] = worst;
        std::cout << "cross-check max relative error vs inversion: " << fmt17(worst) << "\n";
        if (worst > tol) {
            std::cerr << "FAIL: density cross-check above tolerance " << tol << "\n";
            rc = 1;
        }
    }

    if (!out.empty()) {
        write_file(out, csv.str());
        write_manifest_beside(out, manifest);
    } else if (json_out.empty()) {
        std::cout << csv.str();
    }
    if (!json_out.empty()) {
        json jout;
        jout["manifest"] = manifest;
        jout["atom_mass"] = law.atom_mass;
        jout["numeric_only"] = law.numeric_only;
        jout["series_control"] = {{"abs_tol", nsk::SeriesControl{}.abs_tol},
                                  {"max_terms", nsk::SeriesControl{}.max_terms}};
        json pts = json::array();
        for (std::size_t i = 0; i < grid_x.size(); ++i)
            pts.push_back({{"x", grid_x[i]}, {"density", computed[i]}});
        jout["points"] = pts;
        write_file(json_out, jout.dump(2) + "\n");
    }
    return rc;
}

int cmd_residual(const nsk::KernelSpec& spec, const std::vector<double>& xg,
                 const std::vector<double>& tg, double fd_step, bool general_form, double tol,
                 const std::string& out, int threads) {
    if (xg.empty() || tg.empty()) throw CLI::ValidationError("--x/--t", "empty grid");

    struct Row {
        double x, t, lhs, rhs, residual, fd;
        bool refused;
    };
    std::vector<std::pair<double, double>> grid;
    for (double t : tg)
        for (double x : xg) grid.emplace_back(x, t);

    const auto rows = nsk::parallel_map<Row>(
        grid.size(),
        [&](std::size_t i) -> Row {
            const auto [x, t] = grid[i];
            if (general_form) {
                const auto res = nsk::general_equation_check(spec, x, t, fd_step);
                if (res.refused()) {
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    return {x, t, nan, nan, nan, fd_step, true};
                }
                const auto& r = *res.report;
                return {r.x, r.t, r.lhs, r.rhs, r.residual, r.fd_step, false};
            }
            const auto r = nsk::governing_residual(spec, x, t, fd_step);
            return {r.x, r.t, r.lhs, r.rhs, r.residual, r.fd_step, false};
        },
        threads);

    std::ostringstream csv;
    csv << "x,t,lhs,rhs,residual,fd_step,kernel_id\r\n";
    double worst = 0.0;
    bool any_refused = false;
    for (const auto& r : rows) {
        csv << fmt17(r.x) << "," << fmt17(r.t) << "," << fmt17(r.lhs) << "," << fmt17(r.rhs) << ","
            << fmt17(r.residual) << "," << fmt17(r.fd) << "," << spec.id() << "\r\n";
        if (r.refused)
            any_refused = true;
        else
            worst = std::max(worst, std::abs(r.residual));
    }
    if (any_refused)
        std::cerr << "note: general-form check refused for kernel '" << spec.id()
                  << "' (density infinite at the origin); refusal rows carry nan\n";

    json params = {{"kernel", spec.to_json()},
                   {"x_grid", xg},
                   {"t_grid", tg},
                   {"fd_step", fd_step},
                   {"general_form", general_form},
                   {"tol", tol}};
    json manifest = make_manifest("residual", params);
    manifest["max_abs_residual"] = worst;

    if (!out.empty()) {
        write_file(out, csv.str());
        write_manifest_beside(out, manifest);
    } else {
        std::cout << csv.str();
    }
    std::cout << "max |residual| = " << fmt17(worst) << "\n";
    if (worst > tol) {
        std::cerr << "FAIL: residual above tolerance " << tol << "\n";
        return 1;
    }
    return 0;
}

int cmd_laplace_check(const nsk::KernelSpec& spec, double t, const std::vector<double>& etas,
                      double x_min, double x_max, int x_points, double forward_tol,
                      double invert_tol) {
    const nsk::SubordinatorLaw law = nsk::law_of(spec, t);
    if (law.numeric_only) {
        std::cerr << "laplace-check requires a kernel with a closed-form density; '" << spec.id()
                  << "' is inverted numerically and the check would be circular\n";
        return 2;
    }
    auto fwd = reference_transform(spec, t);
    int rc = 0;

    for (double eta : etas) {
        const double closed = fwd(eta);
        const double numeric =
            nsk::numeric_forward(law.density, eta, singular_at_origin(spec));
        const double err = std::abs(closed - numeric);
        std::cout << "forward  eta=" << fmt17(eta) << " closed=" << fmt17(closed)
                  << " quadrature=" << fmt17(numeric) << " abs_err=" << fmt17(err)
                  << (err <= forward_tol ? "  ok" : "  FAIL") << "\n";
        if (err > forward_tol) rc = 1;
    }
    auto fwd_hp = reference_transform_hp(spec, t);
    for (int i = 0; i < x_points; ++i) {
        const double x =
            x_min * std::pow(x_max / x_min, x_points == 1 ? 0.0 : double(i) / (x_points - 1));
        const auto diag = nsk::gaver_stehfest_diagnose(fwd, x);
        const double inverted = nsk::gaver_stehfest_invert_hp(fwd_hp, x, 20);
        const double direct = law.density(x);
        const double rel = std::abs(inverted - direct) / std::max(std::abs(direct), 1e-12);
        std::cout << "invert   x=" << fmt17(x) << " series=" << fmt17(direct)
                  << " stehfest=" << fmt17(inverted) << " rel_err=" << fmt17(rel)
                  << (diag.consistent ? "" : "  [8/12/16 terms disagree]")
                  << (rel <= invert_tol ? "  ok" : "  FAIL") << "\n";
        if (rel > invert_tol) rc = 1;
    }
    return rc;
}

int cmd_simulate(const nsk::KernelSpec& spec, double t, int paths, std::uint64_t seed,
                 std::uint64_t stream, const std::string& out, const std::string& summary_out,
                 int threads) {
    const nsk::RngSeed base{seed, stream};
    const auto values = nsk::sample_values(spec, t, paths, base, threads);

    int zero_count = 0;
    double mean = 0.0;
    for (double v : values) {
        if (v == 0.0) ++zero_count;
        mean += v;
    }
    mean /= values.size();
    const double zero_fraction = static_cast<double>(zero_count) / values.size();

    json manifest = make_manifest("simulate", {{"kernel", spec.to_json()},
                                               {"t", t},
                                               {"paths", paths},
                                               {"seed", seed},
                                               {"stream_id", stream},
                                               {"rng", nsk::kRngName}});

    if (!out.empty()) {
        std::ostringstream csv;
        csv << "path_id,jump_time,jump_size\r\n";
        for (int p = 0; p < paths; ++p) {
            const auto path = nsk::sample_path(spec, t, {seed, stream + p});
            for (std::size_t j = 0; j < path.jump_times.size(); ++j)
                csv << p << "," << fmt17(path.jump_times[j]) << "," << fmt17(path.jump_sizes[j])
                    << "\r\n";
        }
        write_file(out, csv.str());
        write_manifest_beside(out, manifest);
    }

    json summary;
    summary["manifest"] = manifest;
    summary["n_paths"] = paths;
    summary["zero_jump_fraction"] = zero_fraction;
    summary["expected_zero_fraction"] = std::exp(-t);
    summary["mean_value"] = mean;
    const double mu = spec.jump_mean();
    summary["expected_mean"] = std::isinf(mu) ? json("infinite") : json(t * mu);
    if (nsk::detail::has_closed_density(spec)) {
        try {
            const auto ks = nsk::ks_compare(spec, t, paths, base, {}, threads);
            summary["ks_statistic"] = ks.statistic;
            summary["ks_scaled"] = ks.statistic * std::sqrt(static_cast<double>(ks.n_nonzero));
            summary["ks_n_nonzero"] = ks.n_nonzero;
        } catch (const std::exception& e) {
            summary["ks_refusal"] = e.what();
        }
    }
    const std::string text = summary.dump(2) + "\n";
    if (!summary_out.empty())
        write_file(summary_out, text);
    else
        std::cout << text;
    return 0;
}

int cmd_risk(const nsk::KernelSpec& spec, double a, double beta, double horizon, int paths,
             std::uint64_t seed, std::uint64_t stream, const std::string& out, int threads) {
    nsk::RiskConfig cfg;
    cfg.a = a;
    cfg.beta = beta;
    cfg.spec = spec;
    cfg.horizon = horizon;
    cfg.n_paths = paths;
    cfg.validate();

    const auto status = nsk::net_profit_check(cfg);
    const auto est = nsk::ruin_probability(cfg, {seed, stream}, threads);

    json result;
    result["manifest"] = make_manifest("risk", {{"kernel", spec.to_json()},
                                                {"a", a},
                                                {"beta", beta},
                                                {"horizon", horizon},
                                                {"paths", paths},
                                                {"seed", seed},
                                                {"stream_id", stream},
                                                {"rng", nsk::kRngName}});
    result["estimate"] = est.estimate;
    result["ci_half_width_95"] = est.half_width_95;
    result["net_profit_status"] = nsk::to_string(status);
    result["seeds"] = {{"seed", seed}, {"stream_id", stream}};
    const std::string text = result.dump(2) + "\n";
    if (!out.empty())
        write_file(out, text);
    else
        std::cout << text;
    return 0;
}

int cmd_selftest(bool fast) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS " : "FAIL ") << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    };

    // known Laplace pairs
    const double e1 = nsk::gaver_stehfest_invert([](double s) { return 1.0 / (s + 1.0); }, 1.0, 16);
    check("stehfest known pair 1/(s+1)", std::abs(e1 - std::exp(-1.0)) < 1e-6);

    // normalization for three kernels at t = 1
    for (const auto& spec : {nsk::KernelSpec::exponential(0.5),
                             nsk::KernelSpec::mittag_leffler(0.5, 0.6),
                             nsk::KernelSpec::incomplete_gamma(0.5, 0.5)}) {
        const auto law = nsk::law_of(spec, 1.0);
        const double mass =
            law.atom_mass + nsk::numeric_forward(law.density, 0.0, singular_at_origin(spec));
        check("normalization " + spec.id(), std::abs(mass - 1.0) < 1e-6, fmt17(mass));
    }

    // governing residuals at one interior point
    for (const auto& spec :
         {nsk::KernelSpec::exponential(0.5), nsk::KernelSpec::mittag_leffler(0.5, 0.6)}) {
        const auto rep = nsk::governing_residual(spec, 1.0, 1.0);
        check("governing residual " + spec.id(), std::abs(rep.residual) < 1e-5,
              fmt17(rep.residual));
    }

    if (!fast) {
        const auto spec = nsk::KernelSpec::exponential(0.5);
        const auto values = nsk::sample_values(spec, 1.0, 20000, {42, 0});
        int zeros = 0;
        for (double v : values) zeros += v == 0.0;
        const double frac = double(zeros) / values.size();
        const double sigma = std::sqrt(std::exp(-1.0) * (1 - std::exp(-1.0)) / values.size());
        check("zero-jump fraction", std::abs(frac - std::exp(-1.0)) < 4 * sigma, fmt17(frac));
    }
    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: " + std::to_string(failures) + " failure(s)\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compound Poisson subordinators with non-singular convolution kernels"};
    app.require_subcommand(1);

    std::string kernel_arg, out, json_out, summary_out;
    double t = 1.0, x_min = 0.01, x_max = 5.0, fd_step = 0.0;
    double tol = 1e-4, forward_tol = 1e-6, invert_tol = 1e-4;
    int points = 50, x_points = 8, paths = 100000, threads = 0;
    std::uint64_t seed = 1, stream = 0;
    bool linear = false, cross_check = false, general_form = false, fast = false;
    std::string x_list, t_list, eta_list = "0.5,1,2,5";
    double a = 0.0, beta = 1.0, horizon = 10.0;

    auto add_threads = [&](CLI::App* c) {
        c->add_option("--threads", threads, "worker threads (0 = NSK_THREADS or hardware)");
    };

    auto* density = app.add_subcommand("density", "evaluate the subordinator density on a grid");
    density->add_option("--kernel", kernel_arg, "kernel spec JSON (or @file)")->required();
    density->add_option("--t", t, "time")->required();
    density->add_option("--x-min", x_min);
    density->add_option("--x-max", x_max);
    density->add_option("--points", points);
    density->add_flag("--linear", linear, "linear grid instead of geometric");
    density->add_flag("--cross-check", cross_check, "compare against Stehfest inversion");
    density->add_option("--tol", tol, "cross-check relative tolerance");
    density->add_option("--out", out, "CSV output path");
    density->add_option("--json-out", json_out, "JSON output path");
    add_threads(density);

    auto* residual = app.add_subcommand("residual", "governing-equation residual on a grid");
    residual->add_option("--kernel", kernel_arg)->required();
    residual->add_option("--x", x_list, "comma-separated x grid")->required();
    residual->add_option("--t", t_list, "comma-separated t grid")->required();
    residual->add_option("--fd-step", fd_step, "time finite-difference step (0 = auto)");
    residual->add_flag("--general-form", general_form,
                       "check the general finite-activity form instead");
    residual->add_option("--tol", tol, "max |residual| tolerance")->default_val(1e-5);
    residual->add_option("--out", out, "CSV output path");
    add_threads(residual);

    auto* laplace = app.add_subcommand("laplace-check", "closed transform vs quadrature vs inversion");
    laplace->add_option("--kernel", kernel_arg)->required();
    laplace->add_option("--t", t)->required();
    laplace->add_option("--eta", eta_list, "comma-separated eta probes");
    laplace->add_option("--x-min", x_min);
    laplace->add_option("--x-max", x_max);
    laplace->add_option("--x-points", x_points);
    laplace->add_option("--forward-tol", forward_tol);
    laplace->add_option("--invert-tol", invert_tol);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo paths and empirical-law summary");
    simulate->add_option("--kernel", kernel_arg)->required();
    simulate->add_option("--t", t)->required();
    simulate->add_option("--paths", paths);
    simulate->add_option("--seed", seed);
    simulate->add_option("--stream", stream, "base stream id");
    simulate->add_option("--out", out, "paths CSV output path");
    simulate->add_option("--summary", summary_out, "summary JSON output path");
    add_threads(simulate);

    auto* risk = app.add_subcommand("risk", "ruin probability and net-profit screening");
    risk->add_option("--kernel", kernel_arg)->required();
    risk->add_option("--a", a, "initial reserve")->required();
    risk->add_option("--beta", beta, "premium rate")->required();
    risk->add_option("--horizon", horizon);
    risk->add_option("--paths", paths);
    risk->add_option("--seed", seed);
    risk->add_option("--stream", stream);
    risk->add_option("--out", out, "JSON output path");
    add_threads(risk);

    auto* selftest = app.add_subcommand("selftest", "quick library self-checks");
    selftest->add_flag("--fast", fast, "skip the Monte Carlo check");

    CLI11_PARSE(app, argc, argv);

    // the environment variable overrides the flag
    if (const char* env = std::getenv("NSK_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) threads = v;
    }

    try {
        if (density->parsed())
            return cmd_density(parse_kernel(kernel_arg), t, x_min, x_max, points, linear,
                               cross_check, tol, out, json_out, threads);
        if (residual->parsed())
            return cmd_residual(parse_kernel(kernel_arg), parse_list(x_list), parse_list(t_list),
                                fd_step, general_form, tol, out, threads);
        if (laplace->parsed())
            return cmd_laplace_check(parse_kernel(kernel_arg), t, parse_list(eta_list), x_min,
                                     x_max, x_points, forward_tol, invert_tol);
        if (simulate->parsed())
            return cmd_simulate(parse_kernel(kernel_arg), t, paths, seed, stream, out, summary_out,
                                threads);
        if (risk->parsed())
            return cmd_risk(parse_kernel(kernel_arg), a, beta, horizon, paths, seed, stream, out,
                            threads);
        if (selftest->parsed()) return cmd_selftest(fast);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
