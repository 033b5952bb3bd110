#pragma once

#include "mixlap/params.hpp"
#include "mixlap/quadrature.hpp"
#include "mixlap/radial_profile.hpp"

#include <string>
#include <vector>

namespace mixlap::kernels {

/// H(x, t1, t2) = \int exp(-(t1 |xi|^{2s} + t2 |xi|^2)) exp(2 pi i x.xi) dxi.
/// Requires t1 + t2 > 0.
double heat_kernel_two_scale(double x_norm, double t1, double t2, const KernelParams& params,
                             const QuadratureSpec& quad = {});
QuadratureResult heat_kernel_two_scale_detailed(double x_norm, double t1, double t2,
                                                const KernelParams& params,
                                                const QuadratureSpec& quad = {});

/// H(x, t) = H(x, t, t), t > 0.
double heat_kernel(double x_norm, double t, const KernelParams& params,
                   const QuadratureSpec& quad = {});

/// First rescaled form t^{-n/(2s)} H(t^{-1/(2s)} x, 1, t^{1-1/s}).
double heat_kernel_rescaled_fractional(double x_norm, double t, const KernelParams& params,
                                       const QuadratureSpec& quad = {});
/// Second rescaled form t^{-n/2} H(t^{-1/2} x, t^{1-s}, 1).
double heat_kernel_rescaled_gaussian(double x_norm, double t, const KernelParams& params,
                                     const QuadratureSpec& quad = {});

/// alpha(n, s) = 2^{n+2s} pi^{n/2-1} s sin(pi s) Gamma(n/2+s) Gamma(s).
///
/// This constant is the limit of |y|^{n+2s} H for the exp(i y.xi) transform,
/// i.e. |2 pi x|^{n+2s} H(x, 1, eta) -> alpha with x in the units used here.
double asymptotic_alpha(const KernelParams& params);

/// beta(n, s) = 2^{n+2s} pi^{n/2-1} sin(pi s) Gamma(n/2+s) Gamma(s+1); equal to alpha.
double asymptotic_beta(const KernelParams& params);

/// Limit of |x|^{n+2s} H(x, 1, eta) with the 2 pi convention: alpha / (2 pi)^{n+2s}.
double tail_constant(const KernelParams& params);

/// Bessel kernel, inverse transform of 1 / (1 + |xi|^2 + |xi|^{2s}).
/// x_norm = 0 is accepted only for n = 1.
double bessel_kernel(double x_norm, const KernelParams& params, const QuadratureSpec& quad = {});
QuadratureResult bessel_kernel_detailed(double x_norm, const KernelParams& params,
                                        const QuadratureSpec& quad = {});

/// Shifted kernel K_a, inverse transform of 1 / (a + |xi|^2 + |xi|^{2s}), a > 0.
double bessel_kernel_shifted(double x_norm, double a, const KernelParams& params,
                             const QuadratureSpec& quad = {});
QuadratureResult bessel_kernel_shifted_detailed(double x_norm, double a,
                                                const KernelParams& params,
                                                const QuadratureSpec& quad = {});

/// Bessel kernel through \int_0^inf e^{-t} H(x, t) dt. Much slower than the
/// symbol form; used as an independent cross-check.
QuadratureResult bessel_kernel_time_integral(double x_norm, const KernelParams& params,
                                             const QuadratureSpec& quad = {});

/// Symbol (1 + |xi|^{2s}) / (1 + |xi|^2 + |xi|^{2s}) of the resolvent multiplier.
double resolvent_multiplier_symbol(double r, double s);

/// Kernel of the resolvent multiplier, x_norm > 0.
double resolvent_multiplier_kernel(double x_norm, const KernelParams& params,
                                   const QuadratureSpec& quad = {});

enum class KernelKind { heat, heat_two_scale, bessel, bessel_shifted, resolvent_multiplier };

/// Which kernel a profile holds, with its scalar parameters.
struct KernelSpec {
    KernelKind kind = KernelKind::bessel;
    double t1 = 1.0; ///< time for heat, fractional weight for heat_two_scale
    double t2 = 1.0; ///< Gaussian weight for heat_two_scale
    double a = 1.0;  ///< shift for bessel_shifted
    /// Radii below this are not integrated; the singular kernels are extended
    /// by a power law fitted on [r_min, 2 r_min] and flagged.
    double r_min = 1e-3;

    static KernelSpec heat_at(double t);
    static KernelSpec two_scale(double t1, double t2);
    static KernelSpec bessel_kernel();
    static KernelSpec shifted(double a);
    static KernelSpec resolvent();

    std::string label() const;
    void validate() const;
};

KernelSpec kernel_spec_from_label(const std::string& label);

struct KernelValue {
    double value = 0.0;
    double error_estimate = 0.0;
    bool extrapolated = false;
};

KernelValue evaluate(const KernelSpec& spec, double x_norm, const KernelParams& params,
                     const QuadratureSpec& quad = {});

/// Evaluates the kernel on every radius. threads = 0 uses all hardware threads.
RadialProfile tabulate(const KernelSpec& spec, const std::vector<double>& radii,
                       const KernelParams& params, const QuadratureSpec& quad = {},
                       unsigned threads = 0);

/// n-dimensional radial integral omega_{n-1} \int f(r) r^{n-1} dr of a profile by
/// the trapezoid rule in log r. Returns 0 for fewer than two radii.
double radial_integral(const RadialProfile& profile, bool absolute = false);

/// Logarithmically spaced radii from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

} // namespace mixlap::kernels
