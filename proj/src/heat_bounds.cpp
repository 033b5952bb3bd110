#include "mixlap/heat_bounds.hpp"

#include "mixlap/errors.hpp"
#include "mixlap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mixlap::kernels {

std::string to_string(BoundKind kind) {
    switch (kind) {
    case BoundKind::upper: return "upper";
    case BoundKind::lower_large_time: return "lower-large-time";
    case BoundKind::lower_small_time: return "lower-small-time";
    case BoundKind::automatic: return "automatic";
    }
    return "unknown";
}

BoundKind bound_kind_from_string(const std::string& name) {
    for (BoundKind kind : {BoundKind::upper, BoundKind::lower_large_time,
                           BoundKind::lower_small_time, BoundKind::automatic}) {
        if (to_string(kind) == name) return kind;
    }
    throw DomainError("unknown bound kind '" + name + "'");
}

bool in_large_time_regime(double x_norm, double t, const KernelParams& params) {
    return 1.0 < t && t < std::pow(x_norm, 2.0 * params.s);
}

bool in_small_time_regime(double x_norm, double t, const KernelParams& params) {
    const double frac = std::pow(x_norm, 2.0 * params.s);
    return x_norm * x_norm < t && t < frac && frac < 1.0;
}

double upper_bound_shape(double x_norm, double t, const KernelParams& params) {
    const double n = params.n;
    const double s = params.s;
    const double on_diagonal = std::min(std::pow(t, -n / (2.0 * s)), std::pow(t, -0.5 * n));
    if (x_norm == 0.0) return on_diagonal;
    const double off_diagonal = std::max(t, std::pow(t, s)) / std::pow(x_norm, n + 2.0 * s);
    return std::min(off_diagonal, on_diagonal);
}

double lower_large_time_shape(double x_norm, double t, const KernelParams& params) {
    return t / std::pow(x_norm, params.n + 2.0 * params.s);
}

double lower_small_time_shape(double x_norm, double t, const KernelParams& params) {
    return std::exp(-std::numbers::pi * x_norm * x_norm / t) * std::pow(t, -0.5 * params.n);
}

BoundReport heat_bound_check(const std::vector<BoundPoint>& points, const KernelParams& params,
                             const QuadratureSpec& quad, double ratio_cap, double ratio_floor) {
    params.validate();
    BoundReport report;
    report.ratio_cap = ratio_cap;
    report.ratio_floor = ratio_floor;
    double min_large = std::numeric_limits<double>::infinity();
    double min_small = std::numeric_limits<double>::infinity();

    for (const BoundPoint& point : points) {
        if (!(point.t > 0.0) || !(point.x_norm >= 0.0)) {
            throw DomainError("heat_bound_check: need t > 0 and |x| >= 0");
        }
        const bool large = point.x_norm > 0.0 && in_large_time_regime(point.x_norm, point.t, params);
        const bool small = point.x_norm > 0.0 && in_small_time_regime(point.x_norm, point.t, params);
        if (point.kind == BoundKind::lower_large_time && !large) {
            std::ostringstream os;
            os << "heat_bound_check: (|x| = " << point.x_norm << ", t = " << point.t
               << ") is outside 1 < t < |x|^{2s} = " << std::pow(point.x_norm, 2.0 * params.s);
            throw DomainError(os.str());
        }
        if (point.kind == BoundKind::lower_small_time && !small) {
            std::ostringstream os;
            os << "heat_bound_check: (|x| = " << point.x_norm << ", t = " << point.t
               << ") is outside |x|^2 = " << point.x_norm * point.x_norm
               << " < t < |x|^{2s} = " << std::pow(point.x_norm, 2.0 * params.s) << " < 1";
            throw DomainError(os.str());
        }

        const double heat = heat_kernel(point.x_norm, point.t, params, quad);
        const auto record = [&](BoundKind kind, double bound) {
            report.samples.push_back({point.x_norm, point.t, kind, heat, bound, heat / bound});
            return heat / bound;
        };
        const bool automatic = point.kind == BoundKind::automatic;
        if (automatic || point.kind == BoundKind::upper) {
            report.max_upper_ratio = std::max(
                report.max_upper_ratio,
                record(BoundKind::upper, upper_bound_shape(point.x_norm, point.t, params)));
        }
        if ((automatic && large) || point.kind == BoundKind::lower_large_time) {
            min_large = std::min(min_large,
                                 record(BoundKind::lower_large_time,
                                        lower_large_time_shape(point.x_norm, point.t, params)));
        }
        if ((automatic && small) || point.kind == BoundKind::lower_small_time) {
            min_small = std::min(min_small,
                                 record(BoundKind::lower_small_time,
                                        lower_small_time_shape(point.x_norm, point.t, params)));
        }
    }
    report.min_lower_large_ratio = std::isfinite(min_large) ? min_large : 0.0;
    report.min_lower_small_ratio = std::isfinite(min_small) ? min_small : 0.0;
    report.pass = !report.samples.empty() && report.max_upper_ratio <= ratio_cap
                  && (!std::isfinite(min_large) || min_large >= ratio_floor)
                  && (!std::isfinite(min_small) || min_small >= ratio_floor);
    return report;
}

} // namespace mixlap::kernels
