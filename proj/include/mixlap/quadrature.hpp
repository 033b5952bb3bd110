#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mixlap::kernels {

enum class TailAccel { none, alternating_series };

std::string to_string(TailAccel accel);
TailAccel tail_accel_from_string(const std::string& name);

/// Tolerances for the partitioned oscillatory quadrature.
struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-30;
    /// Number of Bessel-zero subintervals summed before giving up.
    int max_zeros = 200000;
    TailAccel tail_accel = TailAccel::alternating_series;

    /// Throws DomainError when the invariants do not hold.
    void validate() const;
    std::string fingerprint() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
    bool extrapolated = false;
};

using RadialFunction = std::function<double(double)>;

/// Integral of f over [a, b] for f smooth on (a, b); a = 0 may carry an
/// algebraic endpoint singularity.
QuadratureResult integrate_interval(const RadialFunction& f, double a, double b, double rel_tol);

/// Integral of f over [0, inf) for f nonoscillatory and eventually decaying.
QuadratureResult integrate_half_line(const RadialFunction& f, const QuadratureSpec& quad);

/// Radial Fourier inversion with the 2*pi-in-the-exponent convention:
///
///   F(x) = \int_{R^n} f(|xi|) exp(2 pi i x.xi) dxi
///        = 2 pi |x|^{1-n/2} \int_0^inf f(r) r^{n/2} J_{n/2-1}(2 pi |x| r) dr.
///
/// The half line is partitioned at the zeros of the Bessel factor, each piece is
/// integrated separately and the partial sums are accelerated with Wynn's epsilon
/// algorithm when `tail_accel` asks for it. n = 1 and n = 3 use the cosine and sine
/// forms of the Bessel factor.
///
/// Throws AccuracyError when max_zeros pieces do not reach the tolerance.
QuadratureResult radial_fourier_inverse(const RadialFunction& symbol, int n, double x_norm,
                                        const QuadratureSpec& quad);

/// Surface area of the unit sphere in R^n.
double unit_sphere_area(int n);

/// Streaming Wynn epsilon extrapolation over a sliding window of partial sums.
class WynnEpsilon {
public:
    explicit WynnEpsilon(std::size_t window = 24) : window_(window) {}

    void push(double partial_sum);
    /// Extrapolated limit of the sequence pushed so far.
    double estimate() const;
    std::size_t size() const noexcept { return sums_.size(); }

private:
    std::size_t window_;
    std::vector<double> sums_;
};

/// Version of the library providing the per-piece quadrature rules.
std::string quadrature_backend_version();

} // namespace mixlap::kernels
