#pragma once

#include "mixlap/groundstate.hpp"
#include "mixlap/kernels.hpp"
#include "mixlap/radial_profile.hpp"
#include "mixlap/spectral_field.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mixlap::kernels {
class ProfileCache;
}

namespace mixlap::analysis {

using spectral::RealField;

/// One row of a verification report.
struct CheckResult {
    std::string check;
    std::pair<double, double> window{0.0, 0.0};
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

nlohmann::json to_json(const CheckResult& result);
nlohmann::json to_json(const std::vector<CheckResult>& results);

/// Shell average around a grid point with shells one cell wide. Distances use the
/// nearest periodic image. Each shell is reported at the mean radius of its points.
RadialProfile radial_average(const RealField& u, std::size_t center);

/// max |u(x) - mean of u over the lattice points at exactly the same distance| / max u,
/// restricted to distances <= max_radius.
double symmetry_deviation(const RealField& u, std::size_t center,
                          double max_radius = std::numeric_limits<double>::infinity());
/// Same, centered at the argmax of u.
double symmetry_deviation(const RealField& u);

struct DecayFit {
    double r_lo = 0.0;
    double r_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double expected_slope = 0.0; ///< -(n + 2s)
    double c1 = 0.0;             ///< min of value * r^{n+2s} on the window
    double c2 = 0.0;             ///< max of value * r^{n+2s} on the window
    std::size_t points = 0;
};

/// Least-squares fit of log(value) against log(radius) on [r_lo, r_hi].
/// Throws DomainError for fewer than 8 radii in the window and for nonpositive values.
DecayFit decay_fit(const RadialProfile& profile, double r_lo, double r_hi);

/// Radius where the profile first drops below max / e.
double decay_length(const RadialProfile& profile);

/// Default ground-state window [max(5, 3 decay lengths), L / 2.5].
std::pair<double, double> default_decay_window(const RadialProfile& profile, double L);

/// Numerical slope of log|f| against log r by centered differences of a profile;
/// used for derivative decay diagnostics.
std::vector<double> centered_log_slopes(const std::vector<double>& r, const std::vector<double>& f);

struct BarrierOptions {
    /// Kernel table points on [r_lo - 1/2, r_hi + 1/2].
    std::size_t table_points = 400;
    /// Tolerance of the one-dimensional convolution quadrature.
    double convolution_tol = 1e-10;
    unsigned threads = 0;
    const kernels::ProfileCache* cache = nullptr;
};

/// (K * indicator of B_{1/2})(r) for r > 1/2, given any radially nonincreasing kernel
/// by its log-log interpolated table.
RadialProfile ball_convolution(const RadialProfile& kernel, const std::vector<double>& radii,
                               double convolution_tol);

/// omega = K * indicator of B_{1/2}.
RadialProfile barrier_subsolution(const KernelParams& params, const kernels::QuadratureSpec& quad,
                                  const std::vector<double>& radii,
                                  const BarrierOptions& options = {});

/// v = K_{1/2} * indicator of B_{1/2}.
RadialProfile barrier_supersolution(const KernelParams& params,
                                    const kernels::QuadratureSpec& quad,
                                    const std::vector<double>& radii,
                                    const BarrierOptions& options = {});

/// Measure of the sphere of radius rho around a point at distance r from the center
/// of B_{1/2} lying inside that ball.
double sphere_ball_overlap(int n, double r, double rho);

/// Volume of the ball of radius R in R^n.
double ball_volume(int n, double R);

/// min u on the grid and its pass flag (min > 0).
CheckResult positivity_audit(const RealField& u);

/// max over grid points and axes of |second difference| / h^2.
double second_difference_sup(const RealField& u);

/// Tolerances of the ground-state verification suite.
struct GroundStateThresholds {
    double residual = 1e-8;
    double nehari_rel = 1e-6;
    double fiber_argmax = 1e-4;
    double t_star = 1e-6;
    double energy_rel = 1e-6;
    double symmetry = 1e-6;
    double slope_rel = 0.10;
    double constant_ratio = 10.0; ///< bound on c2 / c1 over the fit window
};

struct GroundStateSuite {
    std::vector<CheckResult> checks;
    RadialProfile profile;
    std::optional<DecayFit> fit;
    solver::MountainPassProfile fiber;
    bool pass = false;
};

/// Residual, positivity, Nehari, fiber maximizer, energy identity, symmetry and decay checks
/// on a computed ground state. `window` overrides the default decay window.
GroundStateSuite ground_state_suite(const RealField& u, const KernelParams& params,
                                    const solver::SolverConfig& cfg,
                                    const GroundStateThresholds& thresholds = {},
                                    std::optional<std::pair<double, double>> window = {});

struct BarrierSuite {
    RadialProfile subsolution;
    RadialProfile supersolution;
    double c1 = 0.0;         ///< inf omega(r) r^{n+2s}
    double c2 = 0.0;         ///< sup v(r) r^{n+2s}
    double c1_refined = 0.0; ///< same under refined quadrature
    double c2_refined = 0.0;
    std::vector<CheckResult> checks;
    bool pass = false;
};

/// Barrier checks on `radii`: omega > 0 with inf omega r^{n+2s} > 0, sup v r^{n+2s} finite,
/// the pointwise monotonicity envelopes, and stability of c1, c2 (relative change below
/// `stability`) when tolerances are tightened a hundredfold and the kernel table doubled.
BarrierSuite barrier_suite(const KernelParams& params, const kernels::QuadratureSpec& quad,
                           const std::vector<double>& radii, const BarrierOptions& options = {},
                           double stability = 0.05);

} // namespace mixlap::analysis
