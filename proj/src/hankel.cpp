#include "mixlap/quadrature.hpp"

#include "mixlap/errors.hpp"
#include "mixlap/special_fn.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/version.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mixlap::kernels {

namespace {

using Kronrod31 = boost::math::quadrature::gauss_kronrod<double, 31>;
using Gauss15 = boost::math::quadrature::gauss<double, 15>;
constexpr double pi = std::numbers::pi;
constexpr double eps = std::numeric_limits<double>::epsilon();

// Relative accuracy requested from every partition piece. The pieces of an
// oscillatory integral cancel heavily, so this sits well below any user tolerance.
constexpr double piece_rel_tol = 1e-13;

// 31-point Kronrod rule on [-1, 1] with the embedded 15-point Gauss rule as the
// error estimate. Kronrod nodes with even index coincide with the Gauss nodes.
template <class F>
double kronrod31_m1_1(const F& f, double& error, double& l1) {
    const auto& x = Kronrod31::abscissa();
    const auto& wk = Kronrod31::weights();
    const auto& wg = Gauss15::weights();
    const double f0 = f(0.0);
    double kronrod = f0 * wk[0];
    double gauss = f0 * wg[0];
    l1 = std::abs(kronrod);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(x[i]);
        const double fm = f(-x[i]);
        kronrod += wk[i] * (fp + fm);
        l1 += wk[i] * (std::abs(fp) + std::abs(fm));
        if (i % 2 == 0) {
            gauss += wg[i / 2] * (fp + fm);
        }
    }
    error = std::abs(kronrod - gauss);
    return kronrod;
}

double gk_recursive(const RadialFunction& f, double a, double b, double abs_tol, int depth,
                    double& error) {
    const double mean = 0.5 * (a + b);
    const double scale = 0.5 * (b - a);
    double local_error = 0.0;
    double l1 = 0.0;
    const double estimate =
        scale * kronrod31_m1_1([&](double t) { return f(scale * t + mean); }, local_error, l1);
    local_error *= scale;
    // Below this the Kronrod estimate measures integrand noise, not truncation.
    const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * scale * l1;
    if (depth > 0 && local_error > abs_tol && local_error > noise_floor) {
        return gk_recursive(f, a, mean, 0.5 * abs_tol, depth - 1, error)
               + gk_recursive(f, mean, b, 0.5 * abs_tol, depth - 1, error);
    }
    error += local_error;
    return estimate;
}

QuadratureResult gk_adaptive(const RadialFunction& f, double a, double b, double rel_tol) {
    const double mean = 0.5 * (a + b);
    const double scale = 0.5 * (b - a);
    double l1 = 0.0;
    double first_error = 0.0;
    kronrod31_m1_1([&](double t) { return f(scale * t + mean); }, first_error, l1);
    const double abs_tol = std::max(rel_tol * scale * l1, std::numeric_limits<double>::min());
    double error = 0.0;
    const double value = gk_recursive(f, a, b, abs_tol, 18, error);
    return {value, error, 1, false};
}

QuadratureResult tanh_sinh_piece(const RadialFunction& f, double a, double b, double rel_tol) {
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    const double value = integrator.integrate(f, a, b, rel_tol, &error, &l1);
    return {value, error, 1, false};
}

void accumulate(QuadratureResult& total, const QuadratureResult& piece) {
    total.value += piece.value;
    total.error_estimate += piece.error_estimate;
    total.intervals += piece.intervals;
}

// Pieces [a, 2a], [2a, 4a], ... up to b; used when [a, b] spans many scales.
QuadratureResult geometric_pieces(const RadialFunction& f, double a, double b, double rel_tol) {
    QuadratureResult total;
    double lo = a;
    while (lo < b) {
        const double hi = (2.0 * lo < b && 2.5 * lo < b) ? 2.0 * lo : b;
        accumulate(total, gk_adaptive(f, lo, hi, rel_tol));
        lo = hi;
    }
    return total;
}

} // namespace

double unit_sphere_area(int n) {
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

std::string to_string(TailAccel accel) {
    return accel == TailAccel::none ? "none" : "alternating-series";
}

TailAccel tail_accel_from_string(const std::string& name) {
    if (name == "none") return TailAccel::none;
    if (name == "alternating-series" || name == "alternating_series") {
        return TailAccel::alternating_series;
    }
    throw DomainError("unknown tail acceleration '" + name + "'");
}

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw DomainError("quadrature tolerances must be positive");
    }
    if (max_zeros < 4) {
        throw DomainError("quadrature max_zeros must be at least 4");
    }
}

std::string QuadratureSpec::fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << "rel" << rel_tol << "_abs" << abs_tol << "_z" << max_zeros << "_" << to_string(tail_accel);
    return os.str();
}

void WynnEpsilon::push(double partial_sum) {
    sums_.push_back(partial_sum);
    if (sums_.size() > window_) {
        sums_.erase(sums_.begin());
    }
}

double WynnEpsilon::estimate() const {
    const std::size_t count = sums_.size();
    if (count == 0) return 0.0;
    double best = sums_.back();
    double best_error = count >= 2 ? std::abs(sums_[count - 1] - sums_[count - 2])
                                   : std::numeric_limits<double>::infinity();
    std::vector<double> previous(count + 1, 0.0);
    std::vector<double> current(sums_.begin(), sums_.end());
    for (std::size_t column = 1; column < count; ++column) {
        std::vector<double> next(count - column);
        for (std::size_t j = 0; j < next.size(); ++j) {
            const double diff = current[j + 1] - current[j];
            if (diff == 0.0 || !std::isfinite(diff)) {
                return best;
            }
            next[j] = previous[j + 1] + 1.0 / diff;
        }
        if (column % 2 == 0 && next.size() >= 2) {
            const double candidate = next.back();
            const double error = std::abs(next.back() - next[next.size() - 2]);
            if (std::isfinite(candidate) && error < best_error) {
                best = candidate;
                best_error = error;
            }
        }
        previous = std::move(current);
        current = std::move(next);
    }
    return best;
}

QuadratureResult integrate_interval(const RadialFunction& f, double a, double b, double rel_tol) {
    if (!(b > a)) {
        return {};
    }
    if (a == 0.0) {
        const double split = std::min(b, 1.0);
        QuadratureResult total = tanh_sinh_piece(f, 0.0, split, rel_tol);
        if (b > split) {
            accumulate(total, geometric_pieces(f, split, b, rel_tol));
        }
        return total;
    }
    if (b > 2.5 * a) {
        return geometric_pieces(f, a, b, rel_tol);
    }
    return gk_adaptive(f, a, b, rel_tol);
}

QuadratureResult integrate_half_line(const RadialFunction& f, const QuadratureSpec& quad) {
    quad.validate();
    QuadratureResult total = tanh_sinh_piece(f, 0.0, 1.0, piece_rel_tol);
    double lo = 1.0;
    int quiet = 0;
    for (int piece = 0; piece < 1100; ++piece) {
        const double hi = 2.0 * lo;
        const QuadratureResult part = gk_adaptive(f, lo, hi, piece_rel_tol);
        accumulate(total, part);
        lo = hi;
        const double tol = std::max(quad.abs_tol, quad.rel_tol * std::abs(total.value));
        quiet = std::abs(part.value) <= 1e-2 * tol ? quiet + 1 : 0;
        if (quiet >= 3 && piece >= 4) {
            return total;
        }
        if (!std::isfinite(hi)) break;
    }
    throw AccuracyError("integrate_half_line: integrand did not decay", std::abs(total.value));
}

QuadratureResult radial_fourier_inverse(const RadialFunction& symbol, int n, double x_norm,
                                        const QuadratureSpec& quad) {
    quad.validate();
    if (n < 1) {
        throw DomainError("radial_fourier_inverse: dimension must be >= 1");
    }
    if (!(x_norm >= 0.0) || !std::isfinite(x_norm)) {
        throw DomainError("radial_fourier_inverse: |x| must be finite and nonnegative");
    }
    if (x_norm == 0.0) {
        QuadratureResult at_origin = integrate_half_line(
            [&](double r) { return symbol(r) * std::pow(r, n - 1); },
            quad);
        const double area = unit_sphere_area(n);
        at_origin.value *= area;
        at_origin.error_estimate *= area;
        return at_origin;
    }

    const double k = 2.0 * pi * x_norm;
    RadialFunction integrand;
    std::function<double(int)> zero;
    double prefactor = 1.0;
    if (n == 1) {
        integrand = [&](double r) { return symbol(r) * std::cos(k * r); };
        zero = [k](int m) { return (m - 0.5) * pi / k; };
        prefactor = 2.0;
    } else if (n == 3) {
        integrand = [&](double r) { return symbol(r) * r * std::sin(k * r); };
        zero = [k](int m) { return m * pi / k; };
        prefactor = 2.0 / x_norm;
    } else {
        const special::BesselOrder order(0.5 * n - 1.0);
        const double half_n = 0.5 * n;
        integrand = [&, order, half_n](double r) {
            return symbol(r) * std::pow(r, half_n) * special::bessel_j(order, k * r);
        };
        zero = [k, order](int m) { return special::bessel_j_zero(order, m) / k; };
        prefactor = 2.0 * pi * std::pow(x_norm, 1.0 - half_n);
    }

    const bool accelerate = quad.tail_accel == TailAccel::alternating_series;
    WynnEpsilon wynn;
    double sum = 0.0;
    double abs_sum = 0.0;
    double piece_errors = 0.0;
    double last_piece = 0.0;
    double before_last_piece = 0.0;
    double previous_estimate = std::numeric_limits<double>::quiet_NaN();
    double last_change = std::numeric_limits<double>::infinity();
    int stable = 0;
    double lo = 0.0;
    for (int m = 1; m <= quad.max_zeros; ++m) {
        const double hi = zero(m);
        const QuadratureResult piece = integrate_interval(integrand, lo, hi, piece_rel_tol);
        lo = hi;
        sum += piece.value;
        abs_sum += std::abs(piece.value);
        piece_errors += piece.error_estimate;
        before_last_piece = last_piece;
        last_piece = piece.value;

        const double floor = 32.0 * eps * abs_sum;
        const double tol = std::max({quad.abs_tol, quad.rel_tol * std::abs(sum), floor});
        if (m >= 3 && std::abs(last_piece) <= tol && std::abs(before_last_piece) <= 2.0 * tol
            && std::abs(last_piece) <= std::abs(before_last_piece)) {
            const double error = std::abs(last_piece) + floor + piece_errors;
            return {prefactor * sum, std::abs(prefactor) * error, m, false};
        }
        if (accelerate) {
            wynn.push(sum);
            if (wynn.size() >= 6) {
                const double estimate = wynn.estimate();
                const double tol_w =
                    std::max({quad.abs_tol, quad.rel_tol * std::abs(estimate), floor});
                const double change = std::abs(estimate - previous_estimate);
                stable = (std::isfinite(change) && change <= tol_w) ? stable + 1 : 0;
                last_change = std::isfinite(change) ? change : last_change;
                previous_estimate = estimate;
                if (stable >= 3 && m >= 10) {
                    const double error = change + floor + piece_errors;
                    return {prefactor * estimate, std::abs(prefactor) * error, m, true};
                }
            }
        }
    }
    const double achieved = std::abs(prefactor)
                            * (accelerate ? std::min(last_change, std::abs(last_piece))
                                          : std::abs(last_piece));
    std::ostringstream os;
    os << "radial_fourier_inverse: no convergence within " << quad.max_zeros
       << " zero intervals (|x| = " << x_norm << ", achieved error ~ " << achieved << ")";
    throw AccuracyError(os.str(), achieved);
}

std::string quadrature_backend_version() { return "Boost " BOOST_LIB_VERSION; }

} // namespace mixlap::kernels
