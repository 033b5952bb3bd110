#include "mixlap/special_fn.hpp"

#include "mixlap/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mixlap::special {

namespace {

constexpr double pi = std::numbers::pi;

// Hankel's asymptotic expansion is used once x clears this threshold;
// below it the mid-range evaluation goes through the standard library.
double asymptotic_threshold(double nu) { return 20.0 + nu * nu; }

double bessel_j_asymptotic(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double previous = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(term) > std::abs(previous) && k > 2) {
            break; // expansion started to diverge; smallest term reached
        }
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if (std::abs(term) < 1e-17 * (std::abs(p) + std::abs(q))) {
            break;
        }
        previous = term;
    }
    const double chi = x - (0.5 * nu + 0.25) * pi;
    return std::sqrt(2.0 / (pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// J_{l+1/2} by upward recurrence from the closed forms of orders -1/2 and 1/2.
// Stable only for x > l + 1/2.
double bessel_j_half_integer(int l, double x) {
    const double scale = std::sqrt(2.0 / (pi * x));
    double prev = scale * std::cos(x); // J_{-1/2}
    double curr = scale * std::sin(x); // J_{1/2}
    for (int j = 0; j < l; ++j) {
        const double nu = j + 0.5;
        const double next = (2.0 * nu / x) * curr - prev;
        prev = curr;
        curr = next;
    }
    return curr;
}

double bessel_k_half_integer(int l, double x) {
    double prev = std::sqrt(pi / (2.0 * x)) * std::exp(-x); // K_{-1/2} = K_{1/2}
    double curr = prev;
    for (int j = 0; j < l; ++j) {
        const double nu = j + 0.5;
        const double next = prev + (2.0 * nu / x) * curr;
        prev = curr;
        curr = next;
    }
    return curr;
}

double bessel_j_prime(double nu, double x) {
    return (nu / x) * bessel_j(BesselOrder(nu), x) - bessel_j(BesselOrder(nu + 1.0), x);
}

} // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
    if (!(nu >= 0.0) || !std::isfinite(nu)) {
        throw DomainError("Bessel order must be a finite nonnegative number, got " + std::to_string(nu));
    }
}

bool BesselOrder::is_half_integer() const noexcept {
    const double shifted = nu_ - 0.5;
    return shifted >= 0.0 && shifted == std::floor(shifted);
}

double gamma(double x) {
    if (!(x > 0.0)) {
        throw DomainError("gamma: argument must be positive, got " + std::to_string(x));
    }
    return std::tgamma(x);
}

double bessel_j(BesselOrder order, double x) {
    const double nu = order.value();
    if (!(x >= 0.0)) {
        throw DomainError("bessel_j: argument must be nonnegative, got " + std::to_string(x));
    }
    if (x == 0.0) {
        return nu == 0.0 ? 1.0 : 0.0;
    }
    if (order.is_half_integer()) {
        const int l = static_cast<int>(nu - 0.5);
        if (l == 0) {
            return std::sqrt(2.0 / (pi * x)) * std::sin(x);
        }
        if (x > nu + 1.0) {
            return bessel_j_half_integer(l, x);
        }
    }
    if (x >= asymptotic_threshold(nu)) {
        return bessel_j_asymptotic(nu, x);
    }
    const double value = std::cyl_bessel_j(nu, x);
    if (!std::isfinite(value)) {
        throw AccuracyError("bessel_j: evaluation overflow", value);
    }
    return value;
}

double bessel_k(BesselOrder order, double x) {
    const double nu = order.value();
    if (!(x > 0.0)) {
        throw DomainError("bessel_k: argument must be positive, got " + std::to_string(x));
    }
    if (order.is_half_integer()) {
        return bessel_k_half_integer(static_cast<int>(nu - 0.5), x);
    }
    const double value = std::cyl_bessel_k(nu, x);
    if (!std::isfinite(value)) {
        throw AccuracyError("bessel_k: evaluation overflow", value);
    }
    return value;
}

double bessel_j_zero(BesselOrder order, int m) {
    if (m < 1) {
        throw DomainError("bessel_j_zero: zero index must be >= 1");
    }
    const double nu = order.value();
    if (nu == 0.5) {
        return m * pi;
    }
    // McMahon's expansion, with Olver's estimate for the first zero of larger orders.
    const double mu = 4.0 * nu * nu;
    const double beta = (m + 0.5 * nu - 0.25) * pi;
    const double b8 = 8.0 * beta;
    double guess = beta - (mu - 1.0) / b8
                   - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8)
                   - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0)
                         / (15.0 * std::pow(b8, 5));
    if (m == 1 && nu > 2.0) {
        const double c = std::cbrt(nu);
        guess = nu + 1.8557571 * c + 1.033150 / c;
    }
    if (beta > 1000.0) {
        return guess;
    }
    double root = guess;
    for (int it = 0; it < 50; ++it) {
        const double f = bessel_j(order, root);
        const double df = bessel_j_prime(nu, root);
        const double step = f / df;
        root -= step;
        if (std::abs(step) <= 4e-16 * root) {
            break;
        }
    }
    return root;
}

} // namespace mixlap::special
