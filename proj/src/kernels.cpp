#include "mixlap/kernels.hpp"

#include "mixlap/errors.hpp"
#include "mixlap/special_fn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace mixlap::kernels {

namespace {

constexpr double pi = std::numbers::pi;

void check_radius(double x_norm) {
    if (!(x_norm >= 0.0) || !std::isfinite(x_norm)) {
        throw DomainError("|x| must be finite and nonnegative");
    }
}

void check_singular_radius(double x_norm, const KernelParams& params, const char* what) {
    check_radius(x_norm);
    if (x_norm == 0.0 && params.n >= 2) {
        throw DomainError(std::string(what) + ": kernel is singular at |x| = 0 for n >= 2");
    }
}

// Inverse transform of 1 / (a + |xi|^2):
//   2 pi |x|^{1-n/2} a^{(n/2-1)/2} K_{|n/2-1|}(2 pi sqrt(a) |x|).
double yukawa_kernel(double x_norm, double a, int n) {
    const double nu = 0.5 * n - 1.0;
    const double z = 2.0 * pi * std::sqrt(a) * x_norm;
    if (n == 1 && x_norm == 0.0) {
        return pi / std::sqrt(a);
    }
    if (z > 700.0) {
        return 0.0;
    }
    return 2.0 * pi * std::pow(x_norm, -nu) * std::pow(a, 0.5 * nu)
           * special::bessel_k(special::BesselOrder(std::abs(nu)), z);
}

QuadratureResult shifted_kernel(double x_norm, double a, const KernelParams& params,
                                const QuadratureSpec& quad) {
    // 1/(a+r^2+r^{2s}) = 1/(a+r^2) - r^{2s}/((a+r^2)(a+r^2+r^{2s})); the first
    // term has a closed-form transform and the second decays two orders faster.
    const double s = params.s;
    const auto remainder = [a, s](double r) {
        const double frac = std::pow(r, 2.0 * s);
        const double base = a + r * r;
        return -frac / (base * (base + frac));
    };
    QuadratureResult result = radial_fourier_inverse(remainder, params.n, x_norm, quad);
    result.value += yukawa_kernel(x_norm, a, params.n);
    return result;
}

double power_law_extension(double r, double r_min, double v1, double v2) {
    if (!(v1 > 0.0) || !(v2 > 0.0)) {
        throw AccuracyError("kernel extrapolation needs positive values near r_min", 0.0);
    }
    const double slope = std::log(v2 / v1) / std::log(2.0);
    return v1 * std::pow(r / r_min, slope);
}

bool singular_kind(KernelKind kind) {
    return kind == KernelKind::bessel || kind == KernelKind::bessel_shifted
           || kind == KernelKind::resolvent_multiplier;
}

std::string format_number(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

} // namespace

QuadratureResult heat_kernel_two_scale_detailed(double x_norm, double t1, double t2,
                                                const KernelParams& params,
                                                const QuadratureSpec& quad) {
    params.validate();
    check_radius(x_norm);
    if (!(t1 >= 0.0) || !(t2 >= 0.0)) {
        throw DomainError("heat_kernel_two_scale: times must be nonnegative");
    }
    if (!(t1 + t2 > 0.0)) {
        throw DomainError("heat_kernel_two_scale: t1 = t2 = 0 gives a divergent integral");
    }
    const double two_s = 2.0 * params.s;
    const auto symbol = [t1, t2, two_s](double r) {
        return std::exp(-(t1 * std::pow(r, two_s) + t2 * r * r));
    };
    return radial_fourier_inverse(symbol, params.n, x_norm, quad);
}

double heat_kernel_two_scale(double x_norm, double t1, double t2, const KernelParams& params,
                             const QuadratureSpec& quad) {
    return heat_kernel_two_scale_detailed(x_norm, t1, t2, params, quad).value;
}

double heat_kernel(double x_norm, double t, const KernelParams& params,
                   const QuadratureSpec& quad) {
    if (!(t > 0.0)) {
        throw DomainError("heat_kernel: t must be positive");
    }
    return heat_kernel_two_scale(x_norm, t, t, params, quad);
}

double heat_kernel_rescaled_fractional(double x_norm, double t, const KernelParams& params,
                                       const QuadratureSpec& quad) {
    params.validate();
    if (!(t > 0.0)) {
        throw DomainError("heat_kernel: t must be positive");
    }
    const double s = params.s;
    const double y = std::pow(t, -1.0 / (2.0 * s)) * x_norm;
    return std::pow(t, -params.n / (2.0 * s))
           * heat_kernel_two_scale(y, 1.0, std::pow(t, 1.0 - 1.0 / s), params, quad);
}

double heat_kernel_rescaled_gaussian(double x_norm, double t, const KernelParams& params,
                                     const QuadratureSpec& quad) {
    params.validate();
    if (!(t > 0.0)) {
        throw DomainError("heat_kernel: t must be positive");
    }
    const double y = x_norm / std::sqrt(t);
    return std::pow(t, -0.5 * params.n)
           * heat_kernel_two_scale(y, std::pow(t, 1.0 - params.s), 1.0, params, quad);
}

double asymptotic_alpha(const KernelParams& params) {
    params.validate();
    const double n = params.n;
    const double s = params.s;
    return std::pow(2.0, n + 2.0 * s) * std::pow(pi, 0.5 * n - 1.0) * s * std::sin(pi * s)
           * special::gamma(0.5 * n + s) * special::gamma(s);
}

double asymptotic_beta(const KernelParams& params) {
    params.validate();
    const double n = params.n;
    const double s = params.s;
    return std::pow(2.0, n + 2.0 * s) * std::pow(pi, 0.5 * n - 1.0) * std::sin(pi * s)
           * special::gamma(0.5 * n + s) * special::gamma(s + 1.0);
}

double tail_constant(const KernelParams& params) {
    return asymptotic_alpha(params) / std::pow(2.0 * pi, params.n + 2.0 * params.s);
}

QuadratureResult bessel_kernel_detailed(double x_norm, const KernelParams& params,
                                        const QuadratureSpec& quad) {
    params.validate();
    check_singular_radius(x_norm, params, "bessel_kernel");
    return shifted_kernel(x_norm, 1.0, params, quad);
}

double bessel_kernel(double x_norm, const KernelParams& params, const QuadratureSpec& quad) {
    return bessel_kernel_detailed(x_norm, params, quad).value;
}

QuadratureResult bessel_kernel_shifted_detailed(double x_norm, double a,
                                                const KernelParams& params,
                                                const QuadratureSpec& quad) {
    params.validate();
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("bessel_kernel_shifted: shift a must be positive");
    }
    check_singular_radius(x_norm, params, "bessel_kernel_shifted");
    return shifted_kernel(x_norm, a, params, quad);
}

double bessel_kernel_shifted(double x_norm, double a, const KernelParams& params,
                             const QuadratureSpec& quad) {
    return bessel_kernel_shifted_detailed(x_norm, a, params, quad).value;
}

QuadratureResult bessel_kernel_time_integral(double x_norm, const KernelParams& params,
                                             const QuadratureSpec& quad) {
    params.validate();
    quad.validate();
    if (!(x_norm > 0.0) || !std::isfinite(x_norm)) {
        throw DomainError("bessel_kernel_time_integral: |x| must be positive");
    }
    // On [0, t_min] the heat kernel is t times the jump density tail_constant/|x|^{n+2s}
    // up to O(t^2); that head is added in closed form.
    const double t_min = 1e-4 * std::min(1.0, x_norm * x_norm);
    const double t_max = 64.0;
    const double jump_density = tail_constant(params) / std::pow(x_norm, params.n + 2.0 * params.s);
    const double head = jump_density * 0.5 * t_min * t_min;
    const auto integrand = [&](double t) {
        return std::exp(-t) * heat_kernel_two_scale(x_norm, t, t, params, quad);
    };
    QuadratureResult result = integrate_interval(integrand, t_min, t_max, quad.rel_tol);
    result.value += head;
    result.error_estimate += head * t_min;
    return result;
}

double resolvent_multiplier_symbol(double r, double s) {
    const double frac = std::pow(r, 2.0 * s);
    return (1.0 + frac) / (1.0 + r * r + frac);
}

double resolvent_multiplier_kernel(double x_norm, const KernelParams& params,
                                   const QuadratureSpec& quad) {
    params.validate();
    check_singular_radius(x_norm, params, "resolvent_multiplier_kernel");
    const double s = params.s;
    return radial_fourier_inverse([s](double r) { return resolvent_multiplier_symbol(r, s); },
                                  params.n, x_norm, quad)
        .value;
}

KernelSpec KernelSpec::heat_at(double t) {
    KernelSpec spec;
    spec.kind = KernelKind::heat;
    spec.t1 = t;
    spec.t2 = t;
    return spec;
}

KernelSpec KernelSpec::two_scale(double t1, double t2) {
    KernelSpec spec;
    spec.kind = KernelKind::heat_two_scale;
    spec.t1 = t1;
    spec.t2 = t2;
    return spec;
}

KernelSpec KernelSpec::bessel_kernel() {
    return KernelSpec{};
}

KernelSpec KernelSpec::shifted(double a) {
    KernelSpec spec;
    spec.kind = KernelKind::bessel_shifted;
    spec.a = a;
    return spec;
}

KernelSpec KernelSpec::resolvent() {
    KernelSpec spec;
    spec.kind = KernelKind::resolvent_multiplier;
    return spec;
}

std::string KernelSpec::label() const {
    switch (kind) {
    case KernelKind::heat:
        return "heat_t=" + format_number(t1);
    case KernelKind::heat_two_scale:
        return "heat2_t1=" + format_number(t1) + "_t2=" + format_number(t2);
    case KernelKind::bessel:
        return "bessel";
    case KernelKind::bessel_shifted:
        return "bessel_a=" + format_number(a);
    case KernelKind::resolvent_multiplier:
        return "resolvent";
    }
    return "unknown";
}

void KernelSpec::validate() const {
    if (!(r_min > 0.0)) {
        throw DomainError("kernel r_min must be positive");
    }
    switch (kind) {
    case KernelKind::heat:
        if (!(t1 > 0.0)) throw DomainError("heat kernel time must be positive");
        break;
    case KernelKind::heat_two_scale:
        if (!(t1 >= 0.0 && t2 >= 0.0 && t1 + t2 > 0.0)) {
            throw DomainError("two-scale heat kernel needs t1, t2 >= 0 with t1 + t2 > 0");
        }
        break;
    case KernelKind::bessel_shifted:
        if (!(a > 0.0)) throw DomainError("shift a must be positive");
        break;
    default:
        break;
    }
}

KernelSpec kernel_spec_from_label(const std::string& label) {
    const auto value_after = [&](const std::string& key) {
        const auto pos = label.find(key);
        if (pos == std::string::npos) {
            throw DomainError("malformed kernel label '" + label + "'");
        }
        double value = 0.0;
        try {
            value = std::stod(label.substr(pos + key.size()));
        } catch (const std::logic_error&) {
            throw DomainError("malformed number in kernel label '" + label + "'");
        }
        return value;
    };
    KernelSpec spec;
    if (label == "bessel") {
        spec = KernelSpec::bessel_kernel();
    } else if (label == "resolvent") {
        spec = KernelSpec::resolvent();
    } else if (label.rfind("bessel_a=", 0) == 0) {
        spec = KernelSpec::shifted(value_after("a="));
    } else if (label.rfind("heat_t=", 0) == 0) {
        spec = KernelSpec::heat_at(value_after("t="));
    } else if (label.rfind("heat2_", 0) == 0) {
        spec = KernelSpec::two_scale(value_after("t1="), value_after("t2="));
    } else {
        throw DomainError("unknown kernel label '" + label + "'");
    }
    spec.validate();
    return spec;
}

namespace {

QuadratureResult evaluate_direct(const KernelSpec& spec, double x_norm,
                                 const KernelParams& params, const QuadratureSpec& quad) {
    switch (spec.kind) {
    case KernelKind::heat:
        return heat_kernel_two_scale_detailed(x_norm, spec.t1, spec.t1, params, quad);
    case KernelKind::heat_two_scale:
        return heat_kernel_two_scale_detailed(x_norm, spec.t1, spec.t2, params, quad);
    case KernelKind::bessel:
        return bessel_kernel_detailed(x_norm, params, quad);
    case KernelKind::bessel_shifted:
        return bessel_kernel_shifted_detailed(x_norm, spec.a, params, quad);
    case KernelKind::resolvent_multiplier: {
        QuadratureResult result;
        result.value = resolvent_multiplier_kernel(x_norm, params, quad);
        return result;
    }
    }
    return {};
}

bool needs_extension(const KernelSpec& spec, double x_norm, const KernelParams& params) {
    return singular_kind(spec.kind) && params.n >= 2 && x_norm < spec.r_min;
}

} // namespace

KernelValue evaluate(const KernelSpec& spec, double x_norm, const KernelParams& params,
                     const QuadratureSpec& quad) {
    spec.validate();
    params.validate();
    check_radius(x_norm);
    if (needs_extension(spec, x_norm, params)) {
        if (x_norm == 0.0) {
            throw DomainError("kernel '" + spec.label() + "' is singular at |x| = 0");
        }
        const QuadratureResult v1 = evaluate_direct(spec, spec.r_min, params, quad);
        const QuadratureResult v2 = evaluate_direct(spec, 2.0 * spec.r_min, params, quad);
        return {power_law_extension(x_norm, spec.r_min, v1.value, v2.value), v1.error_estimate,
                true};
    }
    const QuadratureResult direct = evaluate_direct(spec, x_norm, params, quad);
    return {direct.value, direct.error_estimate, false};
}

RadialProfile tabulate(const KernelSpec& spec, const std::vector<double>& radii,
                       const KernelParams& params, const QuadratureSpec& quad, unsigned threads) {
    spec.validate();
    params.validate();
    quad.validate();
    RadialProfile profile;
    profile.radii = radii;
    profile.values.assign(radii.size(), 0.0);
    profile.params = params;
    profile.label = spec.label();
    profile.quad = quad.fingerprint();

    double v1 = 0.0;
    double v2 = 0.0;
    const bool any_extension = std::any_of(radii.begin(), radii.end(), [&](double r) {
        return needs_extension(spec, r, params);
    });
    if (any_extension) {
        v1 = evaluate_direct(spec, spec.r_min, params, quad).value;
        v2 = evaluate_direct(spec, 2.0 * spec.r_min, params, quad).value;
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        check_radius(radii[i]);
        if (needs_extension(spec, radii[i], params)) {
            if (radii[i] == 0.0) {
                throw DomainError("kernel '" + spec.label() + "' is singular at |x| = 0");
            }
            profile.extrapolated.push_back(i);
        }
    }

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, radii.size())));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= radii.size()) return;
            try {
                const double r = radii[i];
                profile.values[i] = needs_extension(spec, r, params)
                                        ? power_law_extension(r, spec.r_min, v1, v2)
                                        : evaluate_direct(spec, r, params, quad).value;
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(radii.size());
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }
    if (failure) std::rethrow_exception(failure);
    profile.validate();
    return profile;
}

double radial_integral(const RadialProfile& profile, bool absolute) {
    const auto& r = profile.radii;
    const auto& v = profile.values;
    if (r.size() < 2) return 0.0;
    const int n = profile.params.n;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double f0 = (absolute ? std::abs(v[i]) : v[i]) * std::pow(r[i], n);
        const double f1 = (absolute ? std::abs(v[i + 1]) : v[i + 1]) * std::pow(r[i + 1], n);
        if (r[i] > 0.0) {
            total += 0.5 * (f0 + f1) * std::log(r[i + 1] / r[i]);
        } else {
            const double v0 = absolute ? std::abs(v[i]) : v[i];
            const double v1 = absolute ? std::abs(v[i + 1]) : v[i + 1];
            total += 0.5 * (v0 + v1) * std::pow(r[i + 1], n) / n;
        }
    }
    return unit_sphere_area(n) * total;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
        throw DomainError("log_spaced needs 0 < lo < hi and count >= 2");
    }
    std::vector<double> out(count);
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo * std::exp(step * static_cast<double>(i));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace mixlap::kernels
