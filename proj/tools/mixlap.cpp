// mixlap: kernel tabulation, verification suites, ground-state solver and Monte-Carlo oracle.
//
// Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or config error,
// 3 numerical non-convergence.

#include "mixlap/analysis.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/field_io.hpp"
#include "mixlap/groundstate.hpp"
#include "mixlap/heat_bounds.hpp"
#include "mixlap/kernel_checks.hpp"
#include "mixlap/kernels.hpp"
#include "mixlap/kv_config.hpp"
#include "mixlap/profile_cache.hpp"
#include "mixlap/stable_mc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mixlap;

namespace {

enum ExitCode { exit_pass = 0, exit_failed = 1, exit_usage = 2, exit_nonconvergence = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    int n = 2;
    double s = 0.5;
    unsigned threads = 0;
    std::string output_dir = "mixlap-out";
    double rel_tol = 1e-8;
    double abs_tol = 1e-30;
    int max_zeros = 200000;
    std::string tail_accel = "alternating-series";

    KernelParams params() const { return {n, s}; }
    kernels::QuadratureSpec quad() const {
        kernels::QuadratureSpec q;
        q.rel_tol = rel_tol;
        q.abs_tol = abs_tol;
        q.max_zeros = max_zeros;
        q.tail_accel = kernels::tail_accel_from_string(tail_accel);
        return q;
    }
    json to_json() const {
        return {{"n", n},           {"s", s},           {"threads", threads},
                {"output_dir", output_dir}, {"rel_tol", rel_tol}, {"abs_tol", abs_tol},
                {"max_zeros", max_zeros},   {"tail_accel", tail_accel}};
    }
};

struct KernelTabOptions {
    std::string kernel = "bessel";
    double r_lo = 1e-2;
    double r_hi = 50.0;
    std::size_t points = 200;
    bool no_cache = false;
};

struct KernelVerifyOptions {
    double r_lo = 0.0; // 0 selects the s-dependent default window
    double r_hi = 0.0;
    std::vector<double> widths{0.5, 1.0, 2.0};
    std::vector<double> times{0.5, 1.0, 2.0};
    double l1_range = 50.0;
    int cross_check_points = 0;
};

struct SolveOptions {
    double p = 3.0;
    double L = 20.0;
    int N = 256;
    double gamma = 0.0;
    double tol = 1e-10;
    double tol_stab = 1e-10;
    int max_iter = 500;
    std::string init = "gaussian-bump";
    std::string init_field;
    std::uint64_t seed = 0;
    double perturbation = 0.0;
    double bump_width = 0.0;
    double bump_amplitude = 1.0;
    bool no_dealias = false;

    solver::SolverConfig config() const {
        solver::SolverConfig cfg;
        cfg.p = p;
        cfg.gamma_stab = gamma;
        cfg.tol_residual = tol;
        cfg.tol_stabilizer = tol_stab;
        cfg.max_iter = max_iter;
        cfg.init = solver::init_kind_from_string(init);
        cfg.seed = seed;
        cfg.perturbation = perturbation;
        cfg.bump_width = bump_width;
        cfg.bump_amplitude = bump_amplitude;
        cfg.dealias = !no_dealias;
        return cfg;
    }
};

struct AnalyzeOptions {
    std::string field;
    double p = 3.0;
    bool no_dealias = false;
    double window_lo = 0.0;
    double window_hi = 0.0;
    bool barriers = false;
    std::size_t barrier_points = 25;
};

struct McOptions {
    double t = 1.0;
    std::size_t count = 1000000;
    std::uint64_t seed = 1;
    std::string mode = "mixed";
    double shell_lo = 0.2;
    double shell_hi = 2.0;
    int shells = 18;
    int frequencies = 5;
    std::uint64_t frequency_seed = 7;
    double tail_r = 0.0;
    bool export_samples = false;
};

struct AsymptoticsOptions {
    std::vector<double> radii{20.0, 50.0, 100.0};
    std::vector<double> etas{0.1, 0.5, 0.9};
    double tolerance = 0.05;
};

struct Outcome {
    bool pass = true;
    std::vector<std::string> failed;
    json report;
    int exit_code = exit_pass;
};

void record(Outcome& out, const std::string& name, bool pass) {
    if (!pass) {
        out.pass = false;
        out.failed.push_back(name);
    }
}

void write_json(const json& doc, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path.string());
    out << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
        out << '\n';
    }
}

std::string file_stem(const std::string& label) {
    std::string out;
    for (char c : label) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') ? c : '_';
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
    return out;
}

bool monotone_kernel(kernels::KernelKind kind) {
    return kind != kernels::KernelKind::resolvent_multiplier;
}

// ---------------------------------------------------------------------------------------

Outcome run_kernel_tab(const Common& c, const KernelTabOptions& o, const fs::path& dir) {
    kernels::KernelSpec spec = kernels::kernel_spec_from_label(o.kernel);
    if (!(o.r_lo > 0.0) || !(o.r_hi > o.r_lo) || o.points < 2) {
        throw UsageError("kernel-tab needs 0 < r-lo < r-hi and at least two points");
    }
    const auto radii = kernels::log_spaced(o.r_lo, o.r_hi, o.points);
    const auto quad = c.quad();
    RadialProfile profile =
        o.no_cache ? kernels::tabulate(spec, radii, c.params(), quad, c.threads)
                   : kernels::ProfileCache().get_or_tabulate(spec, radii, c.params(), quad, c.threads);
    const std::string stem = file_stem(spec.label());
    write_profile_csv(profile, dir / (stem + ".csv"));
    write_profile_sidecar(profile, dir / (stem + ".json"));

    Outcome out;
    if (monotone_kernel(spec.kind)) {
        record(out, "nonnegative", profile.nonnegative());
        record(out, "nonincreasing", profile.nonincreasing(1e-8));
    }
    out.report = {{"label", spec.label()},
                  {"points", profile.radii.size()},
                  {"extrapolated", profile.extrapolated.size()},
                  {"csv", stem + ".csv"}};
    return out;
}

Outcome run_kernel_verify(const Common& c, const KernelVerifyOptions& o, const fs::path& dir) {
    const KernelParams params = c.params();
    const auto quad = c.quad();
    Outcome out;
    json checks = json::array();
    auto add = [&](const json& row) {
        checks.push_back(row);
        record(out, row.at("check").get<std::string>(), row.at("pass").get<bool>());
    };

    if (params.n >= 2) {
        auto window = kernels::bessel_decay_window(params.s);
        if (o.r_lo > 0.0) window.first = o.r_lo;
        if (o.r_hi > 0.0) window.second = o.r_hi;
        for (int order = 0; order <= 2; ++order) {
            add(kernels::to_json(kernels::bessel_decay_slope(params, order, window.first, window.second,
                                                             -1.0, quad, c.threads)));
        }
        if (params.n >= 3) {
            add(kernels::to_json(kernels::bessel_origin_slope(params, 1e-3, 1e-2, 0.1, quad, c.threads)));
        }
        add(kernels::to_json(kernels::resolvent_decay_slope(params, 10.0, 50.0, 0.05, quad, c.threads)));
        add(kernels::to_json(kernels::resolvent_l1(params, o.l1_range, quad, c.threads)));
    }
    for (double w : o.widths) add(kernels::to_json(kernels::plancherel_gaussian(params, w, quad, c.threads)));
    for (double t : o.times) add(kernels::to_json(kernels::heat_mass(params, t, quad, c.threads)));

    // Monotonicity and positivity on a common grid.
    const double r_floor = params.n >= 2 ? 1e-2 : 0.0;
    std::vector<double> grid = kernels::log_spaced(std::max(r_floor, 1e-2), 50.0, 100);
    std::vector<kernels::KernelSpec> monotone_specs{kernels::KernelSpec::heat_at(1.0),
                                                    kernels::KernelSpec::bessel_kernel(),
                                                    kernels::KernelSpec::shifted(0.5)};
    std::vector<std::vector<double>> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) rows[i].push_back(grid[i]);
    for (const auto& spec : monotone_specs) {
        const RadialProfile p = kernels::tabulate(spec, grid, params, quad, c.threads);
        for (std::size_t i = 0; i < grid.size(); ++i) rows[i].push_back(p.values[i]);
        add({{"check", "monotone_" + spec.label()},
             {"nonnegative", p.nonnegative()},
             {"nonincreasing", p.nonincreasing(1e-8)},
             {"pass", p.nonnegative() && p.nonincreasing(1e-8)}});
    }
    write_csv(dir / "kernel_profiles.csv", "radius,heat_t=1,bessel,bessel_a=0.5", rows);

    // Two-sided heat-kernel bounds on a mixed sample of (|x|, t).
    std::vector<kernels::BoundPoint> points;
    for (double x : {0.3, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0}) {
        for (double t : {0.1, 0.3, 1.0, 2.0, 5.0}) points.push_back({x, t, kernels::BoundKind::automatic});
    }
    const auto bounds = kernels::heat_bound_check(points, params, quad);
    add({{"check", "heat_bounds"},
         {"max_upper_ratio", bounds.max_upper_ratio},
         {"min_lower_large_ratio", bounds.min_lower_large_ratio},
         {"min_lower_small_ratio", bounds.min_lower_small_ratio},
         {"pass", bounds.pass}});

    if (o.cross_check_points > 0 && params.n >= 2) {
        const auto radii = kernels::log_spaced(0.1, 10.0, static_cast<std::size_t>(o.cross_check_points));
        double worst = 0.0;
        bool pass = true;
        for (double r : radii) {
            const auto direct = kernels::bessel_kernel_detailed(r, params, quad);
            const auto timed = kernels::bessel_kernel_time_integral(r, params, quad);
            const double diff = std::abs(direct.value - timed.value);
            const double allowed = std::max(1e-6 * std::abs(direct.value),
                                            direct.error_estimate + timed.error_estimate);
            worst = std::max(worst, diff / std::abs(direct.value));
            pass = pass && diff <= allowed;
        }
        add({{"check", "symbol_vs_time_integral"}, {"max_rel_diff", worst}, {"pass", pass}});
    }

    out.report = {{"checks", checks}};
    write_json(out.report, dir / "kernel_verify.json");
    return out;
}

Outcome run_solve(const Common& c, const SolveOptions& o, const fs::path& dir) {
    const KernelParams params = c.params();
    const spectral::GridSpec grid{params.n, o.L, o.N};
    const solver::SolverConfig cfg = o.config();
    std::optional<spectral::RealField> custom;
    if (cfg.init == solver::InitKind::custom_field) {
        if (o.init_field.empty()) throw UsageError("--init custom-field requires --init-field");
        custom = spectral::read_field(o.init_field);
    }
    auto [u, report] = solver::solve_ground_state(grid, params, cfg, custom);
    spectral::write_field(u, dir / "ground_state.field");
    json doc = solver::to_json(report);
    doc["grid"] = {{"n", grid.n}, {"L", grid.L}, {"N", grid.N}};
    doc["p"] = cfg.p;
    doc["s"] = params.s;
    write_json(doc, dir / "solve_report.json");

    const std::size_t center = u.argmax();
    const RadialProfile profile = analysis::radial_average(u, center);
    write_profile_csv(profile, dir / "radial_profile.csv");
    spectral::write_axis_slice_csv(u, 0, center, dir / "slice_x.csv");

    Outcome out;
    out.report = doc;
    record(out, "converged", report.converged);
    if (!report.converged) out.exit_code = exit_nonconvergence;
    return out;
}

Outcome run_analyze(const Common& c, const AnalyzeOptions& o, const fs::path& dir) {
    if (o.field.empty()) throw UsageError("analyze requires --field");
    const spectral::RealField u = spectral::read_field(o.field);
    const KernelParams params{u.grid.n, c.s};
    solver::SolverConfig cfg;
    cfg.p = o.p;
    cfg.dealias = !o.no_dealias;
    std::optional<std::pair<double, double>> window;
    if (o.window_lo > 0.0 || o.window_hi > 0.0) {
        if (!(o.window_lo > 0.0) || !(o.window_hi > o.window_lo)) {
            throw UsageError("decay window needs 0 < window-lo < window-hi");
        }
        window = std::make_pair(o.window_lo, o.window_hi);
    }
    const auto suite = analysis::ground_state_suite(u, params, cfg, {}, window);
    Outcome out;
    json checks = analysis::to_json(suite.checks);
    for (const auto& check : suite.checks) record(out, check.check, check.pass);
    write_profile_csv(suite.profile, dir / "radial_profile.csv");
    if (suite.fit) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < suite.profile.radii.size(); ++i) {
            const double r = suite.profile.radii[i];
            if (r < suite.fit->r_lo || r > suite.fit->r_hi) continue;
            rows.push_back({r, suite.profile.values[i], std::exp(suite.fit->intercept) * std::pow(r, suite.fit->slope)});
        }
        write_csv(dir / "decay_fit.csv", "radius,value,fit", rows);
    }
    if (o.barriers) {
        const auto radii = kernels::log_spaced(2.0, 50.0, o.barrier_points);
        analysis::BarrierOptions options;
        options.threads = c.threads;
        const kernels::ProfileCache cache;
        options.cache = &cache;
        const auto barrier = analysis::barrier_suite(params, c.quad(), radii, options);
        for (const auto& check : barrier.checks) {
            checks.push_back(analysis::to_json(check));
            record(out, check.check, check.pass);
        }
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            rows.push_back({radii[i], barrier.subsolution.values[i], barrier.supersolution.values[i]});
        }
        write_csv(dir / "barrier_profiles.csv", "radius,subsolution,supersolution", rows);
    }
    out.report = {{"checks", checks}};
    write_json(out.report, dir / "analysis.json");
    return out;
}

Outcome run_mc_validate(const Common& c, const McOptions& o, const fs::path& dir) {
    const KernelParams params = c.params();
    if (o.shells < 1 || !(o.shell_hi > o.shell_lo) || o.shell_lo < 0.0) {
        throw UsageError("shell range needs 0 <= shell-lo < shell-hi and at least one shell");
    }
    const auto mode = mc::mixture_mode_from_string(o.mode);
    const auto batch = mc::sample_mixed(o.t, params, o.count, o.seed, mode, c.threads);
    if (o.export_samples) mc::write_batch_csv(batch, dir / "samples.csv");

    Outcome out;
    const auto density = mc::compare_density(batch, linspace(o.shell_lo, o.shell_hi, o.shells + 1), c.quad());
    record(out, "shell_density", density.pass);
    record(out, "shell_mass", density.mass_pass);
    record(out, "shell_monotone", density.monotone);
    const auto cf = mc::check_char_function(
        batch, mc::random_frequencies(params.n, static_cast<std::size_t>(o.frequencies), o.frequency_seed));
    for (std::size_t i = 0; i < cf.size(); ++i) record(out, "char_function_" + std::to_string(i), cf[i].pass);
    const auto mean = mc::check_mean(batch);
    record(out, "mean", mean.pass);

    json doc = {{"density", mc::to_json(density)},
                {"char_function", mc::to_json(cf)},
                {"mean", mc::to_json(mean)},
                {"seed", o.seed},
                {"count", o.count},
                {"mode", mc::to_string(mode)}};
    if (mode != mc::MixtureMode::gaussian_only) {
        const double r_tail = o.tail_r > 0.0 ? o.tail_r
                                             : 10.0 * std::max({1.0, std::sqrt(o.t), std::pow(o.t, 0.5 / params.s)});
        const auto tail = mc::check_tail(batch, r_tail);
        record(out, "tail_slope", tail.pass);
        doc["tail"] = mc::to_json(tail);
    }
    std::vector<std::vector<double>> rows;
    for (const auto& sh : density.shells) {
        rows.push_back({sh.r_lo, sh.r_hi, static_cast<double>(sh.hits), sh.empirical_density,
                        sh.reference_density, sh.standard_error, sh.z_score, sh.excluded ? 1.0 : 0.0});
    }
    write_csv(dir / "mc_shells.csv",
              "r_lo,r_hi,hits,empirical_density,reference_density,standard_error,z_score,excluded", rows);
    write_json(doc, dir / "mc_report.json");
    out.report = doc;
    return out;
}

Outcome run_asymptotics(const Common& c, const AsymptoticsOptions& o, const fs::path& dir) {
    const KernelParams params = c.params();
    const auto quad = c.quad();
    if (o.radii.empty() || o.etas.empty()) throw UsageError("asymptotics needs radii and etas");
    const double alpha = kernels::asymptotic_alpha(params);
    const double power = params.n + 2.0 * params.s;
    const double r_max = *std::max_element(o.radii.begin(), o.radii.end());
    Outcome out;
    json rows = json::array();
    std::vector<std::vector<double>> csv;
    for (double eta : o.etas) {
        for (double r : o.radii) {
            const double h_frac = kernels::heat_kernel_two_scale(r, 1.0, eta, params, quad);
            const double h_lin = kernels::heat_kernel_two_scale(r, eta, 1.0, params, quad);
            const double scaled = std::pow(2.0 * std::numbers::pi * r, power);
            const double ratio = scaled * h_frac / alpha;
            const double ratio_linear = scaled * h_lin / (eta * alpha);
            const bool at_max = r == r_max;
            const bool pass = std::abs(ratio - 1.0) <= o.tolerance;
            const bool pass_linear = std::abs(ratio_linear - 1.0) <= o.tolerance;
            if (at_max) {
                record(out, "alpha_limit_eta=" + fmt(eta), pass);
                record(out, "eta_linear_limit_eta=" + fmt(eta), pass_linear);
            }
            rows.push_back({{"eta", eta},
                            {"radius", r},
                            {"artifact_product", std::pow(r, power) * h_frac},
                            {"scaled_product", scaled * h_frac},
                            {"ratio_to_alpha", ratio},
                            {"scaled_product_linear", scaled * h_lin},
                            {"ratio_to_eta_alpha", ratio_linear},
                            {"graded", at_max},
                            {"pass", !at_max || (pass && pass_linear)}});
            csv.push_back({eta, r, std::pow(r, power) * h_frac, ratio, ratio_linear});
        }
    }
    out.report = {{"alpha", alpha},
                  {"tail_constant", kernels::tail_constant(params)},
                  {"tolerance", o.tolerance},
                  {"rows", rows}};
    write_json(out.report, dir / "asymptotics.json");
    write_csv(dir / "asymptotics.csv", "eta,radius,artifact_product,ratio_to_alpha,ratio_to_eta_alpha", csv);
    return out;
}

// ---------------------------------------------------------------------------------------

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--n", c.n, "Dimension")->capture_default_str();
    sub->add_option("--s", c.s, "Fractional order in (0,1)")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--output-dir", c.output_dir, "Directory for emitted files")->capture_default_str();
    sub->add_option("--rel-tol", c.rel_tol, "Quadrature relative tolerance")->capture_default_str();
    sub->add_option("--abs-tol", c.abs_tol, "Quadrature absolute tolerance")->capture_default_str();
    sub->add_option("--max-zeros", c.max_zeros, "Bessel-zero pieces before giving up")->capture_default_str();
    sub->add_option("--tail-accel", c.tail_accel, "none | alternating-series")->capture_default_str();
    sub->add_option("--config", "Config file of `key = value` lines (flags win)");
}

json versions() {
    return {{"mixlap", MIXLAP_VERSION},
            {"compiler", __VERSION__},
            {"fft", spectral::fft_backend_version()},
            {"quadrature", kernels::quadrature_backend_version()}};
}

} // namespace

int main(int argc, char** argv) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<std::string> args(argv + 1, argv + argc);

    std::string config_path;
    std::vector<config::Entry> entries;
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) {
                config_path = args[i + 1];
                args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
                break;
            }
            if (args[i].rfind("--config=", 0) == 0) {
                config_path = args[i].substr(9);
                args.erase(args.begin() + static_cast<long>(i));
                break;
            }
        }
        if (!config_path.empty()) entries = config::read_kv_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "mixlap: " << e.what() << '\n';
        return exit_usage;
    }
    if (!args.empty() && args[0].rfind("-", 0) != 0) {
        std::vector<std::string> rest(args.begin() + 1, args.end());
        rest = config::merge_config_args(entries, rest);
        rest.insert(rest.begin(), args[0]);
        args = std::move(rest);
    } else if (!entries.empty()) {
        std::cerr << "mixlap: --config needs a subcommand\n";
        return exit_usage;
    }

    CLI::App app{"Mixed local/nonlocal Laplacian kernels, ground states and Monte-Carlo checks"};
    app.set_version_flag("--version", std::string(MIXLAP_VERSION));
    app.require_subcommand(1);

    Common common;
    KernelTabOptions tab;
    KernelVerifyOptions verify;
    SolveOptions solve;
    AnalyzeOptions analyze;
    McOptions mc_opts;
    AsymptoticsOptions asym;

    auto* tab_cmd = app.add_subcommand("kernel-tab", "Tabulate a kernel on log-spaced radii");
    add_common(tab_cmd, common);
    tab_cmd->add_option("--kernel", tab.kernel, "heat_t=T | heat2_t1=A_t2=B | bessel | bessel_a=A | resolvent")
        ->capture_default_str();
    tab_cmd->add_option("--r-lo", tab.r_lo)->capture_default_str();
    tab_cmd->add_option("--r-hi", tab.r_hi)->capture_default_str();
    tab_cmd->add_option("--points", tab.points)->capture_default_str();
    tab_cmd->add_flag("--no-cache", tab.no_cache, "Bypass the profile cache");

    auto* verify_cmd = app.add_subcommand("kernel-verify", "Decay, Plancherel, mass, monotonicity and bound checks");
    add_common(verify_cmd, common);
    verify_cmd->add_option("--r-lo", verify.r_lo, "Decay window start (default depends on s)");
    verify_cmd->add_option("--r-hi", verify.r_hi, "Decay window end");
    verify_cmd->add_option("--widths", verify.widths, "Gaussian widths for the Plancherel check")->delimiter(',');
    verify_cmd->add_option("--times", verify.times, "Times for the mass check")->delimiter(',');
    verify_cmd->add_option("--l1-range", verify.l1_range)->capture_default_str();
    verify_cmd->add_option("--cross-check-points", verify.cross_check_points,
                           "Radii for the symbol vs time-integral comparison")->capture_default_str();

    auto* solve_cmd = app.add_subcommand("solve", "Compute a ground state on the periodic box");
    add_common(solve_cmd, common);
    solve_cmd->add_option("--p", solve.p)->capture_default_str();
    solve_cmd->add_option("--L", solve.L, "Box half-width")->capture_default_str();
    solve_cmd->add_option("--N", solve.N, "Points per axis")->capture_default_str();
    solve_cmd->add_option("--gamma", solve.gamma, "Petviashvili exponent (0 = p/(p-1))")->capture_default_str();
    solve_cmd->add_option("--tol", solve.tol, "Residual tolerance")->capture_default_str();
    solve_cmd->add_option("--tol-stab", solve.tol_stab, "Stabilizer tolerance")->capture_default_str();
    solve_cmd->add_option("--max-iter", solve.max_iter)->capture_default_str();
    solve_cmd->add_option("--init", solve.init, "gaussian-bump | custom-field")->capture_default_str();
    solve_cmd->add_option("--init-field", solve.init_field, "Field file for custom-field");
    solve_cmd->add_option("--seed", solve.seed)->capture_default_str();
    solve_cmd->add_option("--perturbation", solve.perturbation)->capture_default_str();
    solve_cmd->add_option("--bump-width", solve.bump_width, "0 = L/8")->capture_default_str();
    solve_cmd->add_option("--bump-amplitude", solve.bump_amplitude)->capture_default_str();
    solve_cmd->add_flag("--no-dealias", solve.no_dealias, "Evaluate u^p without zero padding");

    auto* analyze_cmd = app.add_subcommand("analyze", "Verify positivity, symmetry, decay and identities of a field");
    add_common(analyze_cmd, common);
    analyze_cmd->add_option("--field", analyze.field, "Field file written by solve");
    analyze_cmd->add_option("--p", analyze.p)->capture_default_str();
    analyze_cmd->add_flag("--no-dealias", analyze.no_dealias);
    analyze_cmd->add_option("--window-lo", analyze.window_lo, "Decay window start (default automatic)");
    analyze_cmd->add_option("--window-hi", analyze.window_hi, "Decay window end");
    analyze_cmd->add_flag("--barriers", analyze.barriers, "Also run the barrier checks on [2, 50]");
    analyze_cmd->add_option("--barrier-points", analyze.barrier_points)->capture_default_str();

    auto* mc_cmd = app.add_subcommand("mc-validate", "Monte-Carlo cross-validation of the heat kernel");
    add_common(mc_cmd, common);
    mc_cmd->add_option("--t", mc_opts.t)->capture_default_str();
    mc_cmd->add_option("--count", mc_opts.count)->capture_default_str();
    mc_cmd->add_option("--seed", mc_opts.seed)->capture_default_str();
    mc_cmd->add_option("--mode", mc_opts.mode, "mixed | gaussian-only | stable-only")->capture_default_str();
    mc_cmd->add_option("--shell-lo", mc_opts.shell_lo)->capture_default_str();
    mc_cmd->add_option("--shell-hi", mc_opts.shell_hi)->capture_default_str();
    mc_cmd->add_option("--shells", mc_opts.shells)->capture_default_str();
    mc_cmd->add_option("--frequencies", mc_opts.frequencies)->capture_default_str();
    mc_cmd->add_option("--frequency-seed", mc_opts.frequency_seed)->capture_default_str();
    mc_cmd->add_option("--tail-r", mc_opts.tail_r, "Tail decade start (0 = automatic)");
    mc_cmd->add_flag("--export-samples", mc_opts.export_samples, "Write samples.csv");

    auto* asym_cmd = app.add_subcommand("asymptotics", "Large-|x| limits of the two-scale kernel");
    add_common(asym_cmd, common);
    asym_cmd->add_option("--radii", asym.radii)->delimiter(',');
    asym_cmd->add_option("--etas", asym.etas)->delimiter(',');
    asym_cmd->add_option("--tolerance", asym.tolerance)->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    json manifest = {{"command", command}, {"versions", versions()}};
    if (!config_path.empty()) manifest["config_file"] = config_path;
    json resolved = common.to_json();
    if (command == "kernel-tab") {
        resolved["kernel"] = tab.kernel;
        resolved["r_lo"] = tab.r_lo;
        resolved["r_hi"] = tab.r_hi;
        resolved["points"] = tab.points;
        resolved["no_cache"] = tab.no_cache;
    } else if (command == "kernel-verify") {
        resolved["r_lo"] = verify.r_lo;
        resolved["r_hi"] = verify.r_hi;
        resolved["widths"] = verify.widths;
        resolved["times"] = verify.times;
        resolved["l1_range"] = verify.l1_range;
        resolved["cross_check_points"] = verify.cross_check_points;
    } else if (command == "solve") {
        resolved.update({{"p", solve.p}, {"L", solve.L}, {"N", solve.N}, {"gamma", solve.gamma},
                         {"tol", solve.tol}, {"tol_stab", solve.tol_stab}, {"max_iter", solve.max_iter},
                         {"init", solve.init}, {"init_field", solve.init_field}, {"seed", solve.seed},
                         {"perturbation", solve.perturbation}, {"bump_width", solve.bump_width},
                         {"bump_amplitude", solve.bump_amplitude}, {"dealias", !solve.no_dealias}});
    } else if (command == "analyze") {
        resolved.update({{"field", analyze.field}, {"p", analyze.p}, {"dealias", !analyze.no_dealias},
                         {"window_lo", analyze.window_lo}, {"window_hi", analyze.window_hi},
                         {"barriers", analyze.barriers}, {"barrier_points", analyze.barrier_points}});
    } else if (command == "mc-validate") {
        resolved.update({{"t", mc_opts.t}, {"count", mc_opts.count}, {"seed", mc_opts.seed},
                         {"mode", mc_opts.mode}, {"shell_lo", mc_opts.shell_lo},
                         {"shell_hi", mc_opts.shell_hi}, {"shells", mc_opts.shells},
                         {"frequencies", mc_opts.frequencies}, {"frequency_seed", mc_opts.frequency_seed},
                         {"tail_r", mc_opts.tail_r}, {"export_samples", mc_opts.export_samples}});
    } else if (command == "asymptotics") {
        resolved.update({{"radii", asym.radii}, {"etas", asym.etas}, {"tolerance", asym.tolerance}});
    }
    manifest["config"] = resolved;

    const fs::path dir = common.output_dir;
    try {
        fs::create_directories(dir);
        const fs::path probe = dir / ".mixlap-write-probe";
        std::ofstream(probe) << "";
        if (!fs::exists(probe)) throw UsageError("output directory " + dir.string() + " is not writable");
        fs::remove(probe);
    } catch (const std::exception& e) {
        std::cerr << "mixlap: " << e.what() << '\n';
        return exit_usage;
    }

    Outcome outcome;
    std::string error;
    try {
        common.params().validate();
        common.quad().validate();
        if (command == "kernel-tab") outcome = run_kernel_tab(common, tab, dir);
        else if (command == "kernel-verify") outcome = run_kernel_verify(common, verify, dir);
        else if (command == "solve") outcome = run_solve(common, solve, dir);
        else if (command == "analyze") outcome = run_analyze(common, analyze, dir);
        else if (command == "mc-validate") outcome = run_mc_validate(common, mc_opts, dir);
        else outcome = run_asymptotics(common, asym, dir);
        if (outcome.exit_code == exit_pass && !outcome.pass) outcome.exit_code = exit_failed;
    } catch (const UsageError& e) {
        error = e.what();
        outcome.exit_code = exit_usage;
    } catch (const DomainError& e) {
        error = e.what();
        outcome.exit_code = exit_usage;
    } catch (const StructuralError& e) {
        error = e.what();
        outcome.exit_code = exit_usage;
    } catch (const AccuracyError& e) {
        error = e.what();
        outcome.exit_code = exit_nonconvergence;
    } catch (const ConvergenceError& e) {
        error = e.what();
        outcome.exit_code = exit_nonconvergence;
    } catch (const DegenerateIterateError& e) {
        error = e.what();
        outcome.exit_code = exit_nonconvergence;
    } catch (const std::exception& e) {
        error = e.what();
        outcome.exit_code = exit_failed;
    }
    if (!error.empty()) {
        outcome.pass = false;
        std::cerr << "mixlap " << command << ": " << error << '\n';
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest["wall_time_seconds"] = wall;
    manifest["summary"] = {{"pass", outcome.pass && outcome.exit_code == exit_pass},
                           {"failed_checks", outcome.failed},
                           {"exit_code", outcome.exit_code},
                           {"error", error}};
    try {
        write_json(manifest, dir / "manifest.json");
    } catch (const std::exception& e) {
        std::cerr << "mixlap: " << e.what() << '\n';
        return exit_usage;
    }
    std::cout << command << ": " << (outcome.exit_code == exit_pass ? "PASS" : "FAIL");
    for (const auto& f : outcome.failed) std::cout << ' ' << f;
    std::cout << '\n';
    return outcome.exit_code;
}
