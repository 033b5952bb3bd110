#include "mixlap/analysis.hpp"

#include "mixlap/errors.hpp"
#include "mixlap/profile_cache.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mixlap::analysis {

namespace {

constexpr double pi = std::numbers::pi;

// Offsets of a grid point from the center under the nearest periodic image, in cells.
void periodic_offset(const RealField& u, std::size_t flat, const int* c, int* o) {
    int j[3] = {0, 0, 0};
    u.unravel(flat, j);
    const int N = u.grid.N;
    for (int d = 0; d < u.grid.n; ++d) {
        int delta = j[d] - c[d];
        if (delta >= N / 2) delta -= N;
        if (delta < -N / 2) delta += N;
        o[d] = delta;
    }
}

long squared_offset(const int* o, int n) {
    long sum = 0;
    for (int d = 0; d < n; ++d) sum += static_cast<long>(o[d]) * o[d];
    return sum;
}

} // namespace

nlohmann::json to_json(const CheckResult& result) {
    return {{"check", result.check},
            {"window", {result.window.first, result.window.second}},
            {"statistic", result.statistic},
            {"threshold", result.threshold},
            {"pass", result.pass}};
}

nlohmann::json to_json(const std::vector<CheckResult>& results) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : results) out.push_back(to_json(r));
    return out;
}

RadialProfile radial_average(const RealField& u, std::size_t center) {
    u.validate();
    if (center >= u.data.size()) {
        throw DomainError("radial_average: center outside the grid");
    }
    const double h = u.grid.spacing();
    const int n = u.grid.n;
    int c[3] = {0, 0, 0};
    u.unravel(center, c);
    const std::size_t shells = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)) * u.grid.N / 2) + 2;
    std::vector<double> radius_sum(shells, 0.0);
    std::vector<double> value_sum(shells, 0.0);
    std::vector<std::size_t> count(shells, 0);
    int o[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < u.data.size(); ++flat) {
        periodic_offset(u, flat, c, o);
        const double r = std::sqrt(static_cast<double>(squared_offset(o, n)));
        const auto shell = static_cast<std::size_t>(std::floor(r + 0.5));
        radius_sum[shell] += r * h;
        value_sum[shell] += u.data[flat];
        ++count[shell];
    }
    RadialProfile profile;
    profile.params.n = n;
    profile.label = "radial_average";
    for (std::size_t k = 0; k < shells; ++k) {
        if (count[k] == 0) continue;
        profile.radii.push_back(radius_sum[k] / count[k]);
        profile.values.push_back(value_sum[k] / count[k]);
    }
    return profile;
}

double symmetry_deviation(const RealField& u, std::size_t center, double max_radius) {
    u.validate();
    if (center >= u.data.size()) {
        throw DomainError("symmetry_deviation: center outside the grid");
    }
    const int n = u.grid.n;
    const double h = u.grid.spacing();
    int c[3] = {0, 0, 0};
    u.unravel(center, c);
    const long max_sq = static_cast<long>(n) * (u.grid.N / 2) * (u.grid.N / 2);
    std::vector<double> sum(static_cast<std::size_t>(max_sq) + 1, 0.0);
    std::vector<std::size_t> count(sum.size(), 0);
    int o[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < u.data.size(); ++flat) {
        periodic_offset(u, flat, c, o);
        const long d2 = squared_offset(o, n);
        sum[d2] += u.data[flat];
        ++count[d2];
    }
    const double peak = u.max();
    if (!(peak > 0.0)) {
        throw DomainError("symmetry_deviation: field has no positive maximum");
    }
    double worst = 0.0;
    for (std::size_t flat = 0; flat < u.data.size(); ++flat) {
        periodic_offset(u, flat, c, o);
        const long d2 = squared_offset(o, n);
        if (h * std::sqrt(static_cast<double>(d2)) > max_radius) continue;
        worst = std::max(worst, std::abs(u.data[flat] - sum[d2] / count[d2]));
    }
    return worst / peak;
}

double symmetry_deviation(const RealField& u) {
    return symmetry_deviation(u, u.argmax());
}

DecayFit decay_fit(const RadialProfile& profile, double r_lo, double r_hi) {
    profile.validate();
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) {
        throw DomainError("decay_fit: window must satisfy 0 < r_lo < r_hi");
    }
    const double exponent = profile.params.n + 2.0 * profile.params.s;
    DecayFit fit;
    fit.r_lo = r_lo;
    fit.r_hi = r_hi;
    fit.expected_slope = -exponent;
    std::vector<double> lx;
    std::vector<double> ly;
    fit.c1 = std::numeric_limits<double>::infinity();
    fit.c2 = 0.0;
    for (std::size_t i = 0; i < profile.radii.size(); ++i) {
        const double r = profile.radii[i];
        if (r < r_lo || r > r_hi) continue;
        const double v = profile.values[i];
        if (!(v > 0.0)) {
            throw DomainError("decay_fit: nonpositive value " + std::to_string(v) + " at radius "
                              + std::to_string(r));
        }
        lx.push_back(std::log(r));
        ly.push_back(std::log(v));
        const double scaled = v * std::pow(r, exponent);
        fit.c1 = std::min(fit.c1, scaled);
        fit.c2 = std::max(fit.c2, scaled);
    }
    fit.points = lx.size();
    if (fit.points < 8) {
        throw DomainError("decay_fit: window holds " + std::to_string(fit.points)
                          + " radii, at least 8 are required");
    }
    const double m = static_cast<double>(fit.points);
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

double decay_length(const RadialProfile& profile) {
    profile.validate();
    if (profile.values.empty()) return 0.0;
    const auto peak = std::max_element(profile.values.begin(), profile.values.end());
    const double level = *peak / std::numbers::e;
    for (auto i = static_cast<std::size_t>(peak - profile.values.begin()) + 1; i < profile.values.size(); ++i) {
        if (profile.values[i] < level) {
            const double v0 = profile.values[i - 1];
            const double v1 = profile.values[i];
            const double w = (v0 - level) / (v0 - v1);
            return profile.radii[i - 1] + w * (profile.radii[i] - profile.radii[i - 1]);
        }
    }
    return profile.radii.back();
}

std::pair<double, double> default_decay_window(const RadialProfile& profile, double L) {
    return {std::max(5.0, 3.0 * decay_length(profile)), L / 2.5};
}

std::vector<double> centered_log_slopes(const std::vector<double>& r, const std::vector<double>& f) {
    if (r.size() != f.size() || r.size() < 3) {
        throw StructuralError("centered_log_slopes: need matching arrays of length >= 3");
    }
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        out.push_back((std::log(std::abs(f[i + 1])) - std::log(std::abs(f[i - 1])))
                      / (std::log(r[i + 1]) - std::log(r[i - 1])));
    }
    return out;
}

double ball_volume(int n, double R) {
    return std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) * std::pow(R, n);
}

double sphere_ball_overlap(int n, double r, double rho) {
    constexpr double R = 0.5;
    if (n < 1) throw DomainError("sphere_ball_overlap: n >= 1");
    if (rho <= 0.0) return 0.0;
    if (rho <= R - r) {
        return n == 1 ? 2.0 : kernels::unit_sphere_area(n) * std::pow(rho, n - 1);
    }
    if (rho >= r + R || rho <= r - R) return 0.0;
    const double cos_theta = std::clamp((r * r + rho * rho - R * R) / (2.0 * r * rho), -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    switch (n) {
    case 1:
        return 1.0;
    case 2:
        return 2.0 * rho * theta;
    case 3:
        return 2.0 * pi * rho * rho * (1.0 - cos_theta);
    default: {
        // omega_{n-2} rho^{n-1} \int_0^theta sin^{n-2}
        const auto integrand = [n](double phi) { return std::pow(std::sin(phi), n - 2); };
        const double angular = kernels::integrate_interval(integrand, 0.0, theta, 1e-13).value;
        return kernels::unit_sphere_area(n - 1) * std::pow(rho, n - 1) * angular;
    }
    }
}

RadialProfile ball_convolution(const RadialProfile& kernel, const std::vector<double>& radii,
                               double convolution_tol) {
    kernel.validate();
    const int n = kernel.params.n;
    RadialProfile out;
    out.params = kernel.params;
    out.radii = radii;
    out.quad = kernel.quad;
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    for (double r : radii) {
        if (!(r > 0.5)) {
            throw DomainError("ball_convolution: radii must exceed 1/2");
        }
        const auto integrand = [&](double rho) {
            return kernel.interpolate(rho) * sphere_ball_overlap(n, r, rho);
        };
        out.values.push_back(integrator.integrate(integrand, r - 0.5, r + 0.5, convolution_tol));
    }
    out.validate();
    return out;
}

namespace {

RadialProfile barrier(const kernels::KernelSpec& spec, const std::string& label,
                      const KernelParams& params, const kernels::QuadratureSpec& quad,
                      const std::vector<double>& radii, const BarrierOptions& options) {
    params.validate();
    if (radii.empty()) {
        throw DomainError("barrier: empty radius list");
    }
    for (double r : radii) {
        if (!(r > 1.0)) throw DomainError("barrier radii must exceed 1");
    }
    const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
    const auto table =
        kernels::log_spaced(std::max(*lo - 0.5, spec.r_min), *hi + 0.5, options.table_points);
    const RadialProfile kernel =
        options.cache != nullptr
            ? options.cache->get_or_tabulate(spec, table, params, quad, options.threads)
            : kernels::tabulate(spec, table, params, quad, options.threads);
    RadialProfile out = ball_convolution(kernel, radii, options.convolution_tol);
    out.label = label;
    return out;
}

} // namespace

RadialProfile barrier_subsolution(const KernelParams& params, const kernels::QuadratureSpec& quad,
                                  const std::vector<double>& radii,
                                  const BarrierOptions& options) {
    return barrier(kernels::KernelSpec::bessel_kernel(), "barrier_subsolution", params, quad, radii,
                   options);
}

RadialProfile barrier_supersolution(const KernelParams& params,
                                    const kernels::QuadratureSpec& quad,
                                    const std::vector<double>& radii,
                                    const BarrierOptions& options) {
    return barrier(kernels::KernelSpec::shifted(0.5), "barrier_supersolution", params, quad, radii,
                   options);
}

CheckResult positivity_audit(const RealField& u) {
    const double lowest = u.min();
    return {"positivity", {0.0, u.grid.L}, lowest, 0.0, lowest > 0.0};
}

double second_difference_sup(const RealField& u) {
    const double h2 = u.grid.spacing() * u.grid.spacing();
    double worst = 0.0;
    int j[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < u.data.size(); ++flat) {
        u.unravel(flat, j);
        for (int d = 0; d < u.grid.n; ++d) {
            int up[3] = {j[0], j[1], j[2]};
            int down[3] = {j[0], j[1], j[2]};
            ++up[d];
            --down[d];
            const double diff = u.data[u.index(up)] - 2.0 * u.data[flat] + u.data[u.index(down)];
            worst = std::max(worst, std::abs(diff) / h2);
        }
    }
    return worst;
}

namespace {

CheckResult make_check(std::string name, std::pair<double, double> window, double statistic,
                       double threshold, bool pass) {
    return {std::move(name), window, statistic, threshold, pass};
}

double relative(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min());
}

double weighted_extreme(const RadialProfile& profile, double power, bool lowest) {
    double out = lowest ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t i = 0; i < profile.radii.size(); ++i) {
        const double v = profile.values[i] * std::pow(profile.radii[i], power);
        out = lowest ? std::min(out, v) : std::max(out, v);
    }
    return out;
}

} // namespace

GroundStateSuite ground_state_suite(const RealField& u, const KernelParams& params,
                                    const solver::SolverConfig& cfg,
                                    const GroundStateThresholds& thr,
                                    std::optional<std::pair<double, double>> window) {
    params.validate();
    u.validate();
    const double s = params.s;
    const double p = cfg.p;
    const double L = u.grid.L;
    const std::pair<double, double> box{0.0, L};
    GroundStateSuite out;

    const RealField grad = solver::gradient_plus(u, s, cfg);
    double residual = 0.0;
    for (double v : grad.data) residual = std::max(residual, std::abs(v));
    out.checks.push_back(make_check("residual_linf", box, residual, thr.residual, residual < thr.residual));

    out.checks.push_back(positivity_audit(u));

    const double norm_sq = spectral::energy_inner_product(u, u, s);
    const double nonlinear = solver::nonlinear_integral(u, cfg);
    const double nehari = std::abs(norm_sq - nonlinear) / norm_sq;
    out.checks.push_back(make_check("nehari_gap_rel", box, nehari, thr.nehari_rel, nehari < thr.nehari_rel));

    std::vector<double> t_grid;
    for (int k = 0; k <= 200; ++k) t_grid.push_back(0.01 * (k + 1));
    out.fiber = solver::mountain_pass_profile(u, s, cfg, t_grid);
    const double argmax_dev = std::abs(out.fiber.argmax_t - 1.0);
    out.checks.push_back(make_check("fiber_argmax", {t_grid.front(), t_grid.back()}, argmax_dev,
                                    thr.fiber_argmax, argmax_dev <= thr.fiber_argmax));
    const double t_star_dev = std::abs(out.fiber.t_star - 1.0);
    out.checks.push_back(make_check("t_star_closed_form", box, t_star_dev, thr.t_star,
                                    t_star_dev <= thr.t_star));
    out.checks.push_back(make_check("fiber_negative_far", box, out.fiber.negative_energy, 0.0,
                                    out.fiber.negative_energy < 0.0));

    const double energy = solver::energy_plus(u, s, cfg);
    const double identity = (0.5 - 1.0 / (p + 1.0)) * nonlinear;
    const double energy_dev = relative(energy, identity);
    out.checks.push_back(make_check("energy_identity_rel", box, energy_dev, thr.energy_rel,
                                    energy_dev < thr.energy_rel));
    out.checks.push_back(make_check("energy_positive", box, energy, 0.0, energy > 0.0));

    const std::size_t center = u.argmax();
    const double sym = symmetry_deviation(u, center);
    out.checks.push_back(make_check("symmetry_deviation", box, sym, thr.symmetry, sym < thr.symmetry));

    out.profile = radial_average(u, center);
    const auto win = window ? *window : default_decay_window(out.profile, L);
    const double expected = -(params.n + 2.0 * s);
    try {
        out.fit = decay_fit(out.profile, win.first, win.second);
        const double slope_dev = std::abs(out.fit->slope - expected) / std::abs(expected);
        out.checks.push_back(make_check("decay_slope", win, out.fit->slope, thr.slope_rel,
                                        slope_dev <= thr.slope_rel));
        const double ratio = out.fit->c2 / out.fit->c1;
        out.checks.push_back(make_check("decay_constant_ratio", win, ratio, thr.constant_ratio,
                                        ratio < thr.constant_ratio));
    } catch (const DomainError&) {
        // A nonpositive value in the window is itself a failed decay check.
        out.checks.push_back(make_check("decay_slope", win, std::numeric_limits<double>::quiet_NaN(),
                                        thr.slope_rel, false));
    }

    out.pass = std::all_of(out.checks.begin(), out.checks.end(), [](const auto& c) { return c.pass; });
    return out;
}

BarrierSuite barrier_suite(const KernelParams& params, const kernels::QuadratureSpec& quad,
                           const std::vector<double>& radii, const BarrierOptions& options,
                           double stability) {
    params.validate();
    const double power = params.n + 2.0 * params.s;
    const auto [lo_it, hi_it] = std::minmax_element(radii.begin(), radii.end());
    const std::pair<double, double> window{*lo_it, *hi_it};
    BarrierSuite out;
    out.subsolution = barrier_subsolution(params, quad, radii, options);
    out.supersolution = barrier_supersolution(params, quad, radii, options);
    out.c1 = weighted_extreme(out.subsolution, power, true);
    out.c2 = weighted_extreme(out.supersolution, power, false);

    kernels::QuadratureSpec fine_quad = quad;
    fine_quad.rel_tol = quad.rel_tol * 1e-2;
    BarrierOptions fine = options;
    fine.table_points = 2 * options.table_points;
    fine.convolution_tol = options.convolution_tol * 1e-2;
    out.c1_refined = weighted_extreme(barrier_subsolution(params, fine_quad, radii, fine), power, true);
    out.c2_refined = weighted_extreme(barrier_supersolution(params, fine_quad, radii, fine), power, false);

    const double omega_min = *std::min_element(out.subsolution.values.begin(), out.subsolution.values.end());
    const double v_min = *std::min_element(out.supersolution.values.begin(), out.supersolution.values.end());
    out.checks.push_back(make_check("subsolution_positive", window, omega_min, 0.0, omega_min > 0.0));
    out.checks.push_back(make_check("supersolution_positive", window, v_min, 0.0, v_min > 0.0));
    out.checks.push_back(make_check("subsolution_c1", window, out.c1, 0.0, out.c1 > 0.0));
    out.checks.push_back(make_check("supersolution_c2", window, out.c2, 0.0, std::isfinite(out.c2)));
    const double c1_change = relative(out.c1_refined, out.c1);
    const double c2_change = relative(out.c2_refined, out.c2);
    out.checks.push_back(make_check("c1_refinement_change", window, c1_change, stability, c1_change < stability));
    out.checks.push_back(make_check("c2_refinement_change", window, c2_change, stability, c2_change < stability));

    // Envelopes from radial monotonicity of the kernels.
    const double vol = ball_volume(params.n, 0.5);
    double upper_excess = 0.0;
    double lower_excess = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        const double k_inner = kernels::bessel_kernel(r - 0.5, params, quad);
        upper_excess = std::max(upper_excess, out.subsolution.values[i] / (vol * k_inner) - 1.0);
        const double k_outer = kernels::bessel_kernel_shifted(r + 0.5, 0.5, params, quad);
        lower_excess = std::max(lower_excess, 1.0 - out.supersolution.values[i] / (vol * k_outer));
    }
    // Both excesses must be nonpositive up to the convolution tolerance.
    const double slack = 1e-6;
    out.checks.push_back(make_check("subsolution_envelope", window, upper_excess, slack, upper_excess <= slack));
    out.checks.push_back(make_check("supersolution_envelope", window, lower_excess, slack, lower_excess <= slack));

    out.pass = std::all_of(out.checks.begin(), out.checks.end(), [](const auto& c) { return c.pass; });
    return out;
}

} // namespace mixlap::analysis
