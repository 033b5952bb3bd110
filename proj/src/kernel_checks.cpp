#include "mixlap/kernel_checks.hpp"

#include "mixlap/errors.hpp"
#include "mixlap/kernels.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mixlap::kernels {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> values_at(const KernelSpec& spec, const std::vector<double>& radii,
                              const KernelParams& params, const QuadratureSpec& quad,
                              unsigned threads) {
    return tabulate(spec, radii, params, quad, threads).values;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min());
}

} // namespace

double RadialRule::apply(const std::vector<double>& values) const {
    if (values.size() != weights.size()) {
        throw StructuralError("radial rule applied to a table of different length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += weights[i] * values[i];
    return sum;
}

RadialRule radial_rule(int n, double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo) || n < 1) {
        throw DomainError("radial_rule needs 0 < lo < hi and n >= 1");
    }
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    const double area = unit_sphere_area(n);
    RadialRule out;
    for (double a = lo; a < hi;) {
        const double b = std::min(2.0 * a, hi);
        const double ua = std::log(a), ub = std::log(b);
        const double mid = 0.5 * (ua + ub), half = 0.5 * (ub - ua);
        // Nodes are symmetric around mid; emit them in increasing order.
        std::vector<std::pair<double, double>> piece;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double sign : {-1.0, 1.0}) {
                if (x[i] == 0.0 && sign > 0.0) continue;
                const double u = mid + sign * half * x[i];
                const double r = std::exp(u);
                piece.emplace_back(r, half * w[i] * area * std::pow(r, n));
            }
        }
        std::sort(piece.begin(), piece.end());
        for (const auto& [r, weight] : piece) {
            out.radii.push_back(r);
            out.weights.push_back(weight);
        }
        a = b;
    }
    return out;
}

IdentityCheck plancherel_gaussian(const KernelParams& params, double width,
                                  const QuadratureSpec& quad, unsigned threads, double tolerance) {
    params.validate();
    if (!(width > 0.0)) throw DomainError("Plancherel test width must be positive");
    const int n = params.n;
    const double s = params.s;
    const double lo = 1e-6;
    const RadialRule rule = radial_rule(n, lo, 6.0 * width);
    KernelSpec spec = KernelSpec::bessel_kernel();
    spec.r_min = 0.5 * lo;
    const std::vector<double> k = values_at(spec, rule.radii, params, quad, threads);
    std::vector<double> integrand(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double r = rule.radii[i];
        integrand[i] = k[i] * std::exp(-pi * r * r / (width * width));
    }
    const double area = unit_sphere_area(n);
    const double head = k.front() * area * std::pow(lo, n) / n;

    IdentityCheck out;
    out.name = "plancherel_w=" + std::to_string(width);
    out.lhs = rule.apply(integrand) + head;
    out.rhs = integrate_half_line(
                  [&](double rho) {
                      return area * std::pow(width, n) * std::exp(-pi * width * width * rho * rho)
                             * std::pow(rho, n - 1) / (1.0 + operator_symbol(rho, s));
                  },
                  quad)
                  .value;
    out.rel_error = relative_error(out.lhs, out.rhs);
    out.tolerance = tolerance;
    out.pass = out.rel_error <= tolerance;
    return out;
}

IdentityCheck heat_mass(const KernelParams& params, double t, const QuadratureSpec& quad,
                        unsigned threads, double tolerance) {
    params.validate();
    if (!(t > 0.0)) throw DomainError("heat_mass: t must be positive");
    const int n = params.n;
    const double s = params.s;
    const double lo = 1e-6;
    const double range = 1e3 * std::max({1.0, std::sqrt(t), std::pow(t, 0.5 / s)});
    const RadialRule rule = radial_rule(n, lo, range);
    const std::vector<double> h = values_at(KernelSpec::heat_at(t), rule.radii, params, quad, threads);
    const double area = unit_sphere_area(n);
    const double head = h.front() * area * std::pow(lo, n) / n;
    // Tail law C t r^{-(n+2s)} (1 - c r^{-2s}); c is read off H at the cutoff.
    const double leading = tail_constant(params) * t;
    const double ratio = heat_kernel(range, t, params, quad) * std::pow(range, n + 2.0 * s) / leading;
    const double tail = area * leading * std::pow(range, -2.0 * s) / (2.0 * s)
                        * (1.0 - 0.5 * (1.0 - ratio));

    IdentityCheck out;
    out.name = "heat_mass_t=" + std::to_string(t);
    out.lhs = head + rule.apply(h) + tail;
    out.rhs = 1.0;
    out.rel_error = relative_error(out.lhs, out.rhs);
    out.tolerance = tolerance;
    out.pass = out.rel_error <= tolerance;
    return out;
}

L1Convergence resolvent_l1(const KernelParams& params, double range, const QuadratureSpec& quad,
                           unsigned threads, double tolerance) {
    params.validate();
    if (!(range > 0.0)) throw DomainError("resolvent_l1: range must be positive");
    const int n = params.n;
    const double lo = 1e-6;
    KernelSpec spec = KernelSpec::resolvent();
    spec.r_min = 0.5 * lo;
    auto integral = [&](double hi) {
        const RadialRule rule = radial_rule(n, lo, hi);
        std::vector<double> v = values_at(spec, rule.radii, params, quad, threads);
        const double head = std::abs(v.front()) * unit_sphere_area(n) * std::pow(lo, n) / n;
        for (double& x : v) x = std::abs(x);
        return head + rule.apply(v);
    };
    L1Convergence out;
    out.range = range;
    out.integral = integral(range);
    out.integral_doubled = integral(2.0 * range);
    out.tail_growth = (out.integral_doubled - out.integral) / out.integral;
    out.tolerance = tolerance;
    out.pass = std::abs(out.tail_growth) < tolerance;
    return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("log_log_slope needs two equally long series of length >= 2");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || y[i] == 0.0) throw DomainError("log_log_slope: zero or negative input");
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

SlopeCheck bessel_decay_slope(const KernelParams& params, int order, double r_lo, double r_hi,
                              double tolerance, const QuadratureSpec& quad, unsigned threads) {
    params.validate();
    if (order < 0 || order > 2) throw DomainError("derivative order must be 0, 1 or 2");
    const std::vector<double> radii = log_spaced(r_lo, r_hi, 12);
    // Relative steps balance truncation against quadrature noise.
    const double h_rel = order == 2 ? 2e-2 : 1e-3;
    std::vector<double> nodes;
    for (double r : radii) {
        if (order > 0) nodes.push_back(r * (1.0 - h_rel));
        nodes.push_back(r);
        if (order > 0) nodes.push_back(r * (1.0 + h_rel));
    }
    const std::vector<double> v = values_at(KernelSpec::bessel_kernel(), nodes, params, quad, threads);
    std::vector<double> d(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double h = radii[i] * h_rel;
        if (order == 0) {
            d[i] = v[i];
        } else if (order == 1) {
            d[i] = (v[3 * i + 2] - v[3 * i]) / (2.0 * h);
        } else {
            d[i] = (v[3 * i + 2] - 2.0 * v[3 * i + 1] + v[3 * i]) / (h * h);
        }
    }
    static constexpr double default_tol[] = {0.05, 0.1, 0.15};
    SlopeCheck out;
    out.name = order == 0 ? "bessel_decay" : order == 1 ? "bessel_first_difference_decay"
                                                        : "bessel_second_difference_decay";
    out.r_lo = r_lo;
    out.r_hi = r_hi;
    out.slope = log_log_slope(radii, d);
    out.expected = -(params.n + 2.0 * params.s + order);
    out.tolerance = tolerance > 0.0 ? tolerance : default_tol[order];
    out.pass = std::abs(out.slope - out.expected) <= out.tolerance;
    return out;
}

std::pair<double, double> bessel_decay_window(double s) {
    const double lo = std::clamp(std::pow(5.0, 0.5 / s), 5.0, 1000.0);
    return {lo, 10.0 * lo};
}

SlopeCheck bessel_origin_slope(const KernelParams& params, double r_lo, double r_hi,
                               double tolerance, const QuadratureSpec& quad, unsigned threads) {
    params.validate();
    if (params.n < 3) throw DomainError("near-origin power law applies for n >= 3");
    const std::vector<double> radii = log_spaced(r_lo, r_hi, 12);
    KernelSpec spec = KernelSpec::bessel_kernel();
    spec.r_min = std::min(spec.r_min, 0.5 * r_lo);
    SlopeCheck out;
    out.name = "bessel_origin";
    out.r_lo = r_lo;
    out.r_hi = r_hi;
    out.slope = log_log_slope(radii, values_at(spec, radii, params, quad, threads));
    out.expected = -(params.n - 2.0);
    out.tolerance = tolerance;
    out.pass = std::abs(out.slope - out.expected) <= tolerance;
    return out;
}

SlopeCheck resolvent_decay_slope(const KernelParams& params, double r_lo, double r_hi,
                                 double tolerance, const QuadratureSpec& quad, unsigned threads) {
    params.validate();
    const std::vector<double> radii = log_spaced(r_lo, r_hi, 12);
    SlopeCheck out;
    out.name = "resolvent_decay";
    out.r_lo = r_lo;
    out.r_hi = r_hi;
    out.slope = log_log_slope(radii, values_at(KernelSpec::resolvent(), radii, params, quad, threads));
    out.expected = -(params.n + 1.0 - params.s);
    out.tolerance = tolerance;
    out.pass = out.slope <= out.expected + tolerance;
    return out;
}

nlohmann::json to_json(const IdentityCheck& check) {
    return {{"check", check.name},       {"lhs", check.lhs},
            {"rhs", check.rhs},          {"rel_error", check.rel_error},
            {"tolerance", check.tolerance}, {"pass", check.pass}};
}

nlohmann::json to_json(const L1Convergence& check) {
    return {{"check", "resolvent_l1"},
            {"range", check.range},
            {"integral", check.integral},
            {"integral_doubled", check.integral_doubled},
            {"tail_growth", check.tail_growth},
            {"tolerance", check.tolerance},
            {"pass", check.pass}};
}

nlohmann::json to_json(const SlopeCheck& check) {
    return {{"check", check.name},   {"window", {check.r_lo, check.r_hi}},
            {"slope", check.slope},  {"expected", check.expected},
            {"tolerance", check.tolerance}, {"pass", check.pass}};
}

} // namespace mixlap::kernels
