// Acceptance runner: one PASS/FAIL line per criterion, details indented below it.
//
//   mixlap_acceptance                 all criteria
//   mixlap_acceptance --criterion 5   a single criterion (exit status reflects it)
//   mixlap_acceptance --diagnostic    adds an uncounted resolution study to criterion 8

#include "mixlap/analysis.hpp"
#include "mixlap/groundstate.hpp"
#include "mixlap/kernel_checks.hpp"
#include "mixlap/kernels.hpp"
#include "mixlap/stable_mc.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace mixlap;

namespace {

constexpr double pi = std::numbers::pi;

struct Verdict {
    bool pass = true;
    std::vector<std::string> details;

    void expect(bool ok, const std::string& what) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { details.push_back("info " + what); }
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 1. Pure Gaussian part against its closed form.
Verdict gaussian_oracle() {
    Verdict v;
    for (int n = 1; n <= 3; ++n) {
        for (double t2 : {0.5, 1.0, 2.0}) {
            double worst = 0.0;
            for (int k = 0; k < 20; ++k) {
                const double x = std::sqrt(t2) * k / 19.0;
                const double exact = std::pow(pi / t2, n / 2.0) * std::exp(-pi * pi * x * x / t2);
                const double got = kernels::heat_kernel_two_scale(x, 0.0, t2, {n, 0.5});
                worst = std::max(worst, rel_err(got, exact));
            }
            v.expect(worst < 1e-6, fmt("n=%d t2=%.1f max rel err %.2e (|x| <= sqrt(t2))", n, t2, worst));
        }
    }
    return v;
}

// 2. Pure fractional part at s = 1/2, n = 1 is the Poisson kernel.
Verdict poisson_oracle() {
    Verdict v;
    const double t1 = 1.0;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double x = 5.0 * k / 19.0;
        const double exact = 2.0 * t1 / (t1 * t1 + 4.0 * pi * pi * x * x);
        worst = std::max(worst, rel_err(kernels::heat_kernel_two_scale(x, t1, 0.0, {1, 0.5}), exact));
    }
    v.expect(worst < 1e-6, fmt("t1=1, |x| in [0,5]: max rel err %.2e", worst));
    return v;
}

// 3. Tail constant and its eta-linear counterpart at artifact radius 100.
Verdict asymptotic_constant() {
    Verdict v;
    const KernelParams cases[] = {{2, 0.5}, {3, 0.25}, {3, 0.75}};
    const double r = 100.0;
    for (const auto& params : cases) {
        const double alpha = kernels::asymptotic_alpha(params);
        const double scaled = std::pow(2.0 * pi * r, params.n + 2.0 * params.s);
        for (double eta : {0.1, 0.5, 0.9}) {
            const double frac = scaled * kernels::heat_kernel_two_scale(r, 1.0, eta, params) / alpha;
            const double lin = scaled * kernels::heat_kernel_two_scale(r, eta, 1.0, params) / (eta * alpha);
            v.expect(std::abs(frac - 1.0) <= 0.05,
                     fmt("(n,s)=(%d,%.2f) eta=%.1f: |2 pi x|^(n+2s) H(x,1,eta) / alpha = %.5f",
                         params.n, params.s, eta, frac));
            v.expect(std::abs(lin - 1.0) <= 0.05,
                     fmt("(n,s)=(%d,%.2f) eta=%.1f: |2 pi x|^(n+2s) H(x,eta,1) / (eta alpha) = %.5f",
                         params.n, params.s, eta, lin));
        }
    }
    return v;
}

// 4. Both rescaled forms against direct evaluation.
Verdict scaling_identities() {
    Verdict v;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> log_x(std::log(0.05), std::log(5.0));
    std::uniform_real_distribution<double> log_t(std::log(0.1), std::log(10.0));
    const KernelParams cases[] = {{1, 0.25}, {2, 0.5}, {3, 0.75}, {2, 0.3}, {3, 0.5}};
    double worst_frac = 0.0, worst_gauss = 0.0;
    for (int i = 0; i < 50; ++i) {
        const KernelParams params = cases[i % 5];
        const double x = std::exp(log_x(rng));
        const double t = std::exp(log_t(rng));
        const double direct = kernels::heat_kernel(x, t, params);
        worst_frac = std::max(worst_frac, rel_err(kernels::heat_kernel_rescaled_fractional(x, t, params), direct));
        worst_gauss = std::max(worst_gauss, rel_err(kernels::heat_kernel_rescaled_gaussian(x, t, params), direct));
    }
    v.expect(worst_frac < 1e-6, fmt("fractional rescaling: max rel err %.2e over 50 samples", worst_frac));
    v.expect(worst_gauss < 1e-6, fmt("Gaussian rescaling: max rel err %.2e over 50 samples", worst_gauss));
    return v;
}

// 5. Decay of the Bessel kernel and its differences; near-origin law for n = 3.
Verdict bessel_decay() {
    Verdict v;
    for (const KernelParams params : {KernelParams{2, 0.5}, KernelParams{3, 0.5}}) {
        for (int order = 0; order <= 2; ++order) {
            const auto c = kernels::bessel_decay_slope(params, order, 5.0, 50.0);
            v.expect(c.pass, fmt("(n,s)=(%d,%.1f) %s on [5,50]: slope %.4f, expected %.2f +- %.2f", params.n,
                                 params.s, c.name.c_str(), c.slope, c.expected, c.tolerance));
        }
    }
    const auto origin = kernels::bessel_origin_slope({3, 0.5});
    v.expect(origin.pass, fmt("(n,s)=(3,0.5) near-origin slope on [1e-3,1e-2]: %.4f, expected %.1f +- %.1f",
                              origin.slope, origin.expected, origin.tolerance));
    return v;
}

// 6. Plancherel identity with Gaussian test functions.
Verdict plancherel() {
    Verdict v;
    for (double w : {0.5, 1.0, 2.0}) {
        const auto c = kernels::plancherel_gaussian({2, 0.5}, w);
        v.expect(c.rel_error < 1e-6, fmt("(n,s)=(2,0.5) width %.1f: %.12f vs %.12f, rel err %.2e", w, c.lhs,
                                         c.rhs, c.rel_error));
    }
    return v;
}

// 7. |I| integrable: doubling the range changes the integral by less than 1%.
Verdict resolvent_integrable() {
    Verdict v;
    const auto c = kernels::resolvent_l1({2, 0.5}, 50.0);
    v.expect(c.pass, fmt("int_{|x|<50} |I| = %.8f, int_{|x|<100} |I| = %.8f, growth %.2e", c.integral,
                         c.integral_doubled, c.tail_growth));
    return v;
}

bool diagnostic = false;

// 8. Ground-state suite at the fixed fixture.
Verdict ground_state() {
    Verdict v;
    const KernelParams params{2, 0.5};
    solver::SolverConfig cfg;
    cfg.p = 3.0;
    auto [u, report] = solver::solve_ground_state({2, 20.0, 256}, params, cfg);
    v.expect(report.converged, fmt("L=20 N=256: converged in %d iterations", report.iterations));
    const auto suite = analysis::ground_state_suite(u, params, cfg);
    for (const auto& c : suite.checks) {
        v.expect(c.pass, fmt("%s = %.6g (threshold %.3g, window [%.3g, %.3g])", c.check.c_str(), c.statistic,
                             c.threshold, c.window.first, c.window.second));
    }
    if (diagnostic) {
        auto [fine, fine_report] = solver::solve_ground_state({2, 20.0, 1024}, params, cfg);
        const auto fine_suite = analysis::ground_state_suite(fine, params, cfg);
        for (const auto& c : fine_suite.checks) {
            v.note(fmt("N=1024 (not graded): %s = %.6g, %s", c.check.c_str(), c.statistic,
                       c.pass ? "pass" : "fail"));
        }
    }
    return v;
}

// 9. Energy derivative against the gradient by central differences.
Verdict gradient_check() {
    Verdict v;
    const spectral::GridSpec grid{2, 6.0, 32};
    solver::SolverConfig cfg;
    cfg.p = 3.0;
    const double s = 0.5;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 5; ++trial) {
        // Positive smooth fields keep u^+ = u, so the energy is a polynomial along the line.
        double a[4], b[4];
        for (int k = 0; k < 4; ++k) {
            a[k] = 0.2 * normal(rng);
            b[k] = normal(rng);
        }
        const auto u = spectral::RealField::sample(grid, [&](const double* x) {
            const double r2 = x[0] * x[0] + x[1] * x[1];
            return (1.0 + 0.2 * a[0]) * std::exp(-r2 / 4.0)
                   * (1.5 + 0.3 * std::tanh(a[1] * std::cos(pi * x[0] / 6.0) + a[2] * std::sin(pi * x[1] / 3.0)))
                   + 0.01;
        });
        const auto phi = spectral::RealField::sample(grid, [&](const double* x) {
            return b[0] * std::exp(-(x[0] - 1.0) * (x[0] - 1.0) - x[1] * x[1])
                   + b[1] * std::cos(pi * x[0] / 3.0) + b[2] * std::sin(pi * x[1] / 6.0) + b[3] * 0.1;
        });
        const double exact = spectral::inner_product(solver::gradient_plus(u, s, cfg), phi);
        std::vector<double> steps, errors;
        for (double h = 0.1; h >= 1e-7; h /= 2.0) {
            const double fd = (solver::energy_plus(u + h * phi, s, cfg) - solver::energy_plus(u - h * phi, s, cfg))
                              / (2.0 * h);
            steps.push_back(h);
            errors.push_back(std::abs(fd - exact) / std::abs(exact));
        }
        const auto best = std::min_element(errors.begin(), errors.end()) - errors.begin();
        // Observed order from the three largest steps, where truncation dominates.
        const double order = std::log2(errors[0] / errors[1]);
        const double order2 = std::log2(errors[1] / errors[2]);
        v.expect(errors[best] < 1e-5 && std::abs(order - 2.0) < 0.2 && std::abs(order2 - 2.0) < 0.2,
                 fmt("field %d: min rel err %.2e at h=%.2e, observed orders %.3f %.3f", trial, errors[best],
                     steps[best], order, order2));
    }
    return v;
}

// 10. Monte-Carlo cross-validation of the heat kernel.
Verdict monte_carlo() {
    Verdict v;
    const KernelParams params{2, 0.5};
    const auto batch = mc::sample_mixed(1.0, params, 1000000, 1);
    std::vector<double> edges;
    for (int i = 0; i <= 18; ++i) edges.push_back(0.2 + 0.1 * i);
    const auto density = mc::compare_density(batch, edges);
    double worst = 0.0;
    for (const auto& sh : density.shells) worst = std::max(worst, std::abs(sh.z_score));
    v.expect(density.pass && density.excluded == 0,
             fmt("18 shells on [0.2, 2.0]: max |z| = %.3f, %zu excluded", worst, density.excluded));
    const auto cf = mc::check_char_function(batch, mc::random_frequencies(2, 5, 7));
    for (const auto& c : cf) {
        v.expect(c.pass, fmt("xi=(%.4f, %.4f): empirical %.6f, symbol %.6f, z = %.3f", c.xi[0], c.xi[1],
                             c.empirical, c.symbol, (c.empirical - c.symbol) / c.standard_error));
    }
    v.note("master seed 1, frequency seed 7");
    return v;
}

// 11. Barrier bounds and their stability under refinement.
Verdict barriers() {
    Verdict v;
    const auto radii = kernels::log_spaced(2.0, 50.0, 25);
    const auto suite = analysis::barrier_suite({2, 0.5}, {}, radii);
    for (const auto& c : suite.checks) {
        v.expect(c.pass, fmt("%s = %.6g (threshold %.3g)", c.check.c_str(), c.statistic, c.threshold));
    }
    v.note(fmt("c1 = %.6g (refined %.6g), c2 = %.6g (refined %.6g)", suite.c1, suite.c1_refined, suite.c2,
               suite.c2_refined));
    return v;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Verdict()> run;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-11)")->check(CLI::Range(1, 11));
    app.add_flag("--diagnostic", diagnostic, "Add the uncounted fine-grid study to criterion 8");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "Gaussian oracle", 10, gaussian_oracle},
        {2, "Poisson oracle", 10, poisson_oracle},
        {3, "asymptotic constant", 120, asymptotic_constant},
        {4, "scaling identities", 60, scaling_identities},
        {5, "Bessel-kernel decay", 120, bessel_decay},
        {6, "Plancherel identity", 30, plancherel},
        {7, "resolvent integrability", 60, resolvent_integrable},
        {8, "ground-state suite", 300, ground_state},
        {9, "gradient check", 60, gradient_check},
        {10, "Monte-Carlo cross-validation", 180, monte_carlo},
        {11, "barrier checks", 120, barriers},
    };

    bool all_pass = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict verdict;
        try {
            verdict = c.run();
        } catch (const std::exception& e) {
            verdict.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        // The runtime budget only binds the graded work.
        const bool in_time = diagnostic && c.id == 8 ? true : seconds <= c.limit_seconds;
        const bool pass = verdict.pass && in_time;
        all_pass = all_pass && pass;
        std::printf("criterion %2d %-30s %s  (%.2f s, limit %.0f s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    seconds, c.limit_seconds);
        for (const auto& d : verdict.details) std::printf("    %s\n", d.c_str());
        if (!in_time) std::printf("    FAIL runtime over budget\n");
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
