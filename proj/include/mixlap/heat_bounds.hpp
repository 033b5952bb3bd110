#pragma once

#include "mixlap/params.hpp"
#include "mixlap/quadrature.hpp"

#include <string>
#include <vector>

namespace mixlap::kernels {

/// Which two-sided heat-kernel estimate a sample point exercises.
///
///   upper             H <= C {t v t^s} / |x|^{n+2s}  ^  {t^{-n/(2s)} ^ t^{-n/2}}   (all x, t)
///   lower_large_time  H >= c t / |x|^{n+2s}                 for 1 < t < |x|^{2s}
///   lower_small_time  H >= c e^{-pi |x|^2 / t} t^{-n/2}      for |x|^2 < t < |x|^{2s} < 1
///
/// `automatic` checks the upper bound and whichever lower bound's regime contains the point.
enum class BoundKind { upper, lower_large_time, lower_small_time, automatic };

std::string to_string(BoundKind kind);
BoundKind bound_kind_from_string(const std::string& name);

struct BoundPoint {
    double x_norm = 1.0;
    double t = 1.0;
    BoundKind kind = BoundKind::automatic;
};

struct BoundSample {
    double x_norm = 0.0;
    double t = 0.0;
    BoundKind kind = BoundKind::upper; ///< resolved, never automatic
    double heat = 0.0;
    double bound = 0.0;
    double ratio = 0.0; ///< heat / bound
};

struct BoundReport {
    std::vector<BoundSample> samples;
    double max_upper_ratio = 0.0;         ///< empirical C_1
    double min_lower_large_ratio = 0.0;   ///< 0 when no sample in that regime
    double min_lower_small_ratio = 0.0;
    double ratio_cap = 1e4;               ///< upper ratios must stay below
    double ratio_floor = 1e-4;            ///< lower ratios must stay above
    bool pass = false;
};

bool in_large_time_regime(double x_norm, double t, const KernelParams& params);
bool in_small_time_regime(double x_norm, double t, const KernelParams& params);

double upper_bound_shape(double x_norm, double t, const KernelParams& params);
double lower_large_time_shape(double x_norm, double t, const KernelParams& params);
double lower_small_time_shape(double x_norm, double t, const KernelParams& params);

/// Evaluates H at every point and compares with the bound shapes.
/// Throws DomainError when an explicitly requested lower bound is outside its regime.
BoundReport heat_bound_check(const std::vector<BoundPoint>& points, const KernelParams& params,
                             const QuadratureSpec& quad = {}, double ratio_cap = 1e4,
                             double ratio_floor = 1e-4);

} // namespace mixlap::kernels
