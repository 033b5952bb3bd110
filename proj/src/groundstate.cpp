#include "mixlap/groundstate.hpp"

#include "mixlap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mixlap::solver {

namespace {

constexpr double subcritical_margin = 1e-6;

bool is_integer(double p) { return p == std::floor(p); }

RealField positive_power(const RealField& u, double p) {
    RealField out(u.grid);
    for (std::size_t i = 0; i < u.data.size(); ++i) {
        const double v = u.data[i];
        out.data[i] = v > 0.0 ? std::pow(v, p) : 0.0;
    }
    return out;
}

RealField refine(const RealField& u, int factor) {
    return spectral::inverse(spectral::resample(spectral::forward(u), u.grid.N * factor));
}

double max_abs(const RealField& f) {
    double out = 0.0;
    for (double v : f.data) out = std::max(out, std::abs(v));
    return out;
}

struct Evaluation {
    RealField nonlinear;   // (u^+)^p
    RealField shifted_op;  // (1 + m) u
    double norm_s_squared = 0.0;
    double pairing = 0.0;  // <u, (u^+)^p> = \int (u^+)^{p+1}
};

Evaluation evaluate_at(const RealField& u, double s, const SolverConfig& cfg) {
    Evaluation e{nonlinearity(u, cfg), spectral::apply_operator(u, s, true), 0.0, 0.0};
    e.norm_s_squared = spectral::energy_inner_product(u, u, s);
    e.pairing = spectral::inner_product(u, e.nonlinear);
    return e;
}

} // namespace

std::string to_string(InitKind kind) {
    return kind == InitKind::gaussian_bump ? "gaussian-bump" : "custom-field";
}

InitKind init_kind_from_string(const std::string& name) {
    if (name == "gaussian-bump" || name == "gaussian_bump") return InitKind::gaussian_bump;
    if (name == "custom-field" || name == "custom_field") return InitKind::custom_field;
    throw DomainError("unknown init kind '" + name + "'");
}

double critical_exponent(int n) {
    return n <= 2 ? std::numeric_limits<double>::infinity()
                  : (n + 2.0) / (n - 2.0);
}

double SolverConfig::gamma() const { return gamma_stab > 0.0 ? gamma_stab : p / (p - 1.0); }

void SolverConfig::validate(int n) const {
    if (!(p > 1.0 + subcritical_margin)) {
        throw DomainError("exponent p must exceed 1, got " + std::to_string(p));
    }
    if (!(p < critical_exponent(n) - subcritical_margin)) {
        throw DomainError("exponent p = " + std::to_string(p)
                          + " is not subcritical for n = " + std::to_string(n));
    }
    if (!(tol_residual > 0.0) || !(tol_stabilizer > 0.0)) {
        throw DomainError("solver tolerances must be positive");
    }
    if (max_iter < 1) {
        throw DomainError("max_iter must be positive");
    }
    if (!(bump_amplitude > 0.0) || bump_width < 0.0 || perturbation < 0.0) {
        throw DomainError("initial bump needs positive amplitude and nonnegative width");
    }
}

int SolverConfig::padding_factor() const {
    if (!dealias || !is_integer(p)) return 1;
    return static_cast<int>(std::ceil((p + 1.0) / 2.0));
}

nlohmann::json to_json(const SolveReport& report) {
    nlohmann::json doc;
    doc["iterations"] = report.iterations;
    doc["residual_linf"] = report.residual_linf;
    doc["energy"] = report.energy;
    doc["nehari_gap"] = report.nehari_gap;
    doc["norm_s_squared"] = report.norm_s_squared;
    doc["nonlinear_integral"] = report.nonlinear_integral;
    doc["min_value"] = report.min_value;
    doc["max_value"] = report.max_value;
    doc["stabilizer_history"] = report.stabilizer_history;
    doc["converged"] = report.converged;
    doc["message"] = report.message;
    return doc;
}

RealField nonlinearity(const RealField& u, const SolverConfig& cfg) {
    const int factor = cfg.padding_factor();
    if (factor == 1) {
        return positive_power(u, cfg.p);
    }
    const RealField fine = positive_power(refine(u, factor), cfg.p);
    return spectral::inverse(spectral::resample(spectral::forward(fine), u.grid.N));
}

double nonlinear_integral(const RealField& u, const SolverConfig& cfg) {
    const int factor = cfg.padding_factor();
    const RealField field = factor == 1 ? u : refine(u, factor);
    double sum = 0.0;
    for (double v : field.data) {
        if (v > 0.0) sum += std::pow(v, cfg.p + 1.0);
    }
    return field.grid.cell_volume() * sum;
}

double energy_plus(const RealField& u, double s, const SolverConfig& cfg) {
    return 0.5 * spectral::energy_inner_product(u, u, s)
           - nonlinear_integral(u, cfg) / (cfg.p + 1.0);
}

RealField gradient_plus(const RealField& u, double s, const SolverConfig& cfg) {
    return spectral::apply_operator(u, s, true) - nonlinearity(u, cfg);
}

StepResult petviashvili_step(const RealField& u, double s, const SolverConfig& cfg) {
    const RealField g = nonlinearity(u, cfg);
    const double pairing = spectral::inner_product(u, g);
    if (!(pairing > 0.0)) {
        throw DegenerateIterateError("Petviashvili step: <u, (u^+)^p> <= 0; iterate collapsed");
    }
    const double stabilizer = spectral::energy_inner_product(u, u, s) / pairing;
    RealField next = spectral::apply_resolvent(g, s);
    next *= std::pow(stabilizer, cfg.gamma());
    return {std::move(next), stabilizer};
}

RealField initial_guess(const GridSpec& grid, const SolverConfig& cfg) {
    const double width = cfg.bump_width > 0.0 ? cfg.bump_width : grid.L / 8.0;
    double center[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < grid.n; ++d) center[d] = cfg.bump_shift[d] * grid.spacing();
    RealField u = RealField::sample(grid, [&](const double* x) {
        double r2 = 0.0;
        for (int d = 0; d < grid.n; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
        return cfg.bump_amplitude * std::exp(-0.5 * r2 / (width * width));
    });
    if (cfg.perturbation > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> noise(-1.0, 1.0);
        for (double& v : u.data) v *= 1.0 + cfg.perturbation * noise(rng);
    }
    return u;
}

std::pair<RealField, SolveReport> solve_ground_state(const GridSpec& grid,
                                                     const KernelParams& params,
                                                     const SolverConfig& cfg,
                                                     const std::optional<RealField>& custom) {
    params.validate();
    if (params.n != 2 && params.n != 3) {
        throw DomainError("ground-state solver supports n = 2 and n = 3");
    }
    if (grid.n != params.n) {
        throw StructuralError("grid dimension differs from kernel dimension");
    }
    grid.validate();
    cfg.validate(params.n);

    RealField u;
    if (cfg.init == InitKind::custom_field) {
        if (!custom) {
            throw DomainError("init = custom-field requires an initial field");
        }
        if (!(custom->grid == grid)) {
            throw StructuralError("custom initial field lives on a different grid");
        }
        u = *custom;
    } else {
        u = initial_guess(grid, cfg);
    }

    const double s = params.s;
    SolveReport report;
    for (int k = 0; k < cfg.max_iter; ++k) {
        Evaluation e = evaluate_at(u, s, cfg);
        if (!(e.pairing > 0.0)) {
            throw DegenerateIterateError("Petviashvili iteration collapsed to a nonpositive field");
        }
        const double stabilizer = e.norm_s_squared / e.pairing;
        report.stabilizer_history.push_back(stabilizer);
        report.iterations = k;
        report.residual_linf = max_abs(e.shifted_op - e.nonlinear);
        report.norm_s_squared = e.norm_s_squared;
        report.nonlinear_integral = e.pairing;
        if (report.residual_linf <= cfg.tol_residual
            && std::abs(stabilizer - 1.0) < cfg.tol_stabilizer) {
            report.converged = true;
            break;
        }
        if (!std::isfinite(stabilizer)) {
            throw ConvergenceError("Petviashvili stabilizer became non-finite");
        }
        RealField next = spectral::apply_resolvent(e.nonlinear, s);
        next *= std::pow(stabilizer, cfg.gamma());
        u = std::move(next);
        report.iterations = k + 1;
    }
    if (!report.converged) {
        // Diagnostics for the final iterate.
        const Evaluation e = evaluate_at(u, s, cfg);
        report.residual_linf = max_abs(e.shifted_op - e.nonlinear);
        report.norm_s_squared = e.norm_s_squared;
        report.nonlinear_integral = e.pairing;
        report.message = "no convergence within max_iter iterations";
    } else {
        report.message = "converged";
    }
    report.nehari_gap = std::abs(report.norm_s_squared - report.nonlinear_integral);
    report.energy = 0.5 * report.norm_s_squared - report.nonlinear_integral / (cfg.p + 1.0);
    report.min_value = u.min();
    report.max_value = u.max();
    return {std::move(u), std::move(report)};
}

MountainPassProfile mountain_pass_profile(const RealField& u, double s, const SolverConfig& cfg,
                                          const std::vector<double>& t_grid) {
    const double norm_sq = spectral::energy_inner_product(u, u, s);
    const double nonlinear = nonlinear_integral(u, cfg);
    if (!(nonlinear > 0.0)) {
        throw DomainError("mountain_pass_profile: u^+ vanishes, no stationary point");
    }
    MountainPassProfile out;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw DomainError("mountain_pass_profile: t must be positive");
        RealField scaled = u;
        scaled *= t;
        out.samples.push_back({t, energy_plus(scaled, s, cfg)});
    }
    const double p = cfg.p;
    out.t_star = std::pow(norm_sq / nonlinear, 1.0 / (p - 1.0));
    if (!out.samples.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < out.samples.size(); ++i) {
            if (out.samples[i].energy > out.samples[best].energy) best = i;
        }
        out.argmax_t = out.samples[best].t;
        if (best > 0 && best + 1 < out.samples.size()) {
            const auto& a = out.samples[best - 1];
            const auto& b = out.samples[best];
            const auto& c = out.samples[best + 1];
            const double denom = (b.t - a.t) * (b.energy - c.energy) - (b.t - c.t) * (b.energy - a.energy);
            if (denom != 0.0) {
                const double numer = (b.t - a.t) * (b.t - a.t) * (b.energy - c.energy)
                                     - (b.t - c.t) * (b.t - c.t) * (b.energy - a.energy);
                out.argmax_t = b.t - 0.5 * numer / denom;
            }
        }
    }
    // F^+(t u) changes sign at t_star ((p+1)/2)^{1/(p-1)}; twice that is safely negative.
    out.negative_t = 2.0 * out.t_star * std::pow(0.5 * (p + 1.0), 1.0 / (p - 1.0));
    RealField far = u;
    far *= out.negative_t;
    out.negative_energy = energy_plus(far, s, cfg);
    return out;
}

} // namespace mixlap::solver
