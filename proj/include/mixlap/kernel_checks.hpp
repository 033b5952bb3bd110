#pragma once

#include "mixlap/params.hpp"
#include "mixlap/quadrature.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace mixlap::kernels {

/// Quadrature rule for omega_{n-1} \int f(r) r^{n-1} dr: 20-point Gauss-Legendre in log r on
/// each dyadic piece of [lo, hi]. Evaluating a kernel at `radii` and summing against
/// `weights` integrates the tabulated profile to spectral accuracy.
struct RadialRule {
    std::vector<double> radii;
    std::vector<double> weights;

    double apply(const std::vector<double>& values) const;
};

RadialRule radial_rule(int n, double lo, double hi);

/// Two independent evaluations of the same number.
struct IdentityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// \int K phi dx from the tabulated Bessel kernel against \int phi^ / (1 + m) dxi, with
/// phi(x) = exp(-pi |x|^2 / w^2) and phi^(xi) = w^n exp(-pi w^2 |xi|^2).
IdentityCheck plancherel_gaussian(const KernelParams& params, double width,
                                  const QuadratureSpec& quad = {}, unsigned threads = 0,
                                  double tolerance = 1e-6);

/// \int H(x, t) dx against 1. The part beyond the table is added from the tail law.
IdentityCheck heat_mass(const KernelParams& params, double t, const QuadratureSpec& quad = {},
                        unsigned threads = 0, double tolerance = 1e-4);

struct L1Convergence {
    double range = 0.0;
    double integral = 0.0;         ///< \int_{|x| < range} |I|
    double integral_doubled = 0.0; ///< \int_{|x| < 2 range} |I|
    double tail_growth = 0.0;      ///< relative increase
    double tolerance = 0.01;
    bool pass = false;
};

L1Convergence resolvent_l1(const KernelParams& params, double range,
                           const QuadratureSpec& quad = {}, unsigned threads = 0,
                           double tolerance = 0.01);

struct SlopeCheck {
    std::string name;
    double r_lo = 0.0;
    double r_hi = 0.0;
    double slope = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Log-log slope of |d^order K / dr^order| on 12 log-spaced radii of [r_lo, r_hi];
/// derivatives by centered differences of kernel evaluations. Expected -(n + 2s + order).
SlopeCheck bessel_decay_slope(const KernelParams& params, int order, double r_lo = 5.0,
                              double r_hi = 50.0, double tolerance = -1.0,
                              const QuadratureSpec& quad = {}, unsigned threads = 0);

/// Decade [5^{1/(2s)}, 10 * 5^{1/(2s)}] clamped to start in [5, 1000]. The leading
/// correction to the tail law is relative r^{-2s}, so this window gives it the same size
/// for every s.
std::pair<double, double> bessel_decay_window(double s);

/// Log-log slope of K on [r_lo, r_hi] near the origin; expected -(n - 2) for n >= 3.
SlopeCheck bessel_origin_slope(const KernelParams& params, double r_lo = 1e-3,
                               double r_hi = 1e-2, double tolerance = 0.1,
                               const QuadratureSpec& quad = {}, unsigned threads = 0);

/// Fitted slope of |I| on [r_lo, r_hi]; passes when it is at most -(n + 1 - s) + tolerance.
SlopeCheck resolvent_decay_slope(const KernelParams& params, double r_lo = 10.0,
                                 double r_hi = 50.0, double tolerance = 0.05,
                                 const QuadratureSpec& quad = {}, unsigned threads = 0);

/// Least-squares slope of log|y| against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const IdentityCheck& check);
nlohmann::json to_json(const L1Convergence& check);
nlohmann::json to_json(const SlopeCheck& check);

} // namespace mixlap::kernels
