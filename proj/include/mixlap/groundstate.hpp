#pragma once

#include "mixlap/params.hpp"
#include "mixlap/spectral_field.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mixlap::solver {

using spectral::GridSpec;
using spectral::RealField;

enum class InitKind { gaussian_bump, custom_field };

std::string to_string(InitKind kind);
InitKind init_kind_from_string(const std::string& name);

/// Settings for the ground state of -Lap u + (-Lap)^s u + u = (u^+)^p.
struct SolverConfig {
    double p = 3.0;
    /// Petviashvili exponent; 0 selects p / (p - 1).
    double gamma_stab = 0.0;
    double tol_residual = 1e-10;
    /// Required |m_k - 1| at convergence.
    double tol_stabilizer = 1e-10;
    int max_iter = 500;
    InitKind init = InitKind::gaussian_bump;
    std::uint64_t seed = 0;
    /// Relative amplitude of seeded multiplicative noise on the initial bump.
    double perturbation = 0.0;
    double bump_amplitude = 1.0;
    /// Bump width; 0 selects L / 8.
    double bump_width = 0.0;
    /// Bump center offset from the box center in whole cells.
    std::array<int, 3> bump_shift{0, 0, 0};
    /// Evaluate (u^+)^p on a zero-padded grid when p is an integer.
    bool dealias = true;

    double gamma() const;
    /// Throws DomainError when p is not strictly subcritical (margin 1e-6) or a
    /// tolerance is not positive.
    void validate(int n) const;
    /// Padding factor ceil((p+1)/2) for integer p, 1 otherwise.
    int padding_factor() const;
};

/// Upper end of the admissible exponent range; infinity for n <= 2.
double critical_exponent(int n);

struct SolveReport {
    int iterations = 0;
    double residual_linf = 0.0;
    double energy = 0.0;
    double nehari_gap = 0.0;      ///< | ||u||_s^2 - \int (u^+)^{p+1} |
    double norm_s_squared = 0.0;
    double nonlinear_integral = 0.0; ///< \int (u^+)^{p+1}
    double min_value = 0.0;
    double max_value = 0.0;
    std::vector<double> stabilizer_history;
    bool converged = false;
    std::string message;
};

nlohmann::json to_json(const SolveReport& report);

/// (u^+)^p, dealiased by zero padding when configured.
RealField nonlinearity(const RealField& u, const SolverConfig& cfg);

/// \int (u^+)^{p+1} with the same quadrature as `nonlinearity`.
double nonlinear_integral(const RealField& u, const SolverConfig& cfg);

/// F^+(u) = 1/2 ||u||_s^2 - 1/(p+1) \int (u^+)^{p+1}.
double energy_plus(const RealField& u, double s, const SolverConfig& cfg);

/// (1 + m) u - (u^+)^p; its grid inner product with phi is the derivative of energy_plus along phi.
RealField gradient_plus(const RealField& u, double s, const SolverConfig& cfg);

struct StepResult {
    RealField next;
    double stabilizer = 0.0;
};

/// One Petviashvili update. Throws DegenerateIterateError when <u, (u^+)^p> <= 0.
StepResult petviashvili_step(const RealField& u, double s, const SolverConfig& cfg);

RealField initial_guess(const GridSpec& grid, const SolverConfig& cfg);

/// Iterates from the configured initial guess (or `custom` for InitKind::custom_field).
/// Returns converged = false with diagnostics when max_iter is exhausted.
std::pair<RealField, SolveReport> solve_ground_state(const GridSpec& grid,
                                                     const KernelParams& params,
                                                     const SolverConfig& cfg,
                                                     const std::optional<RealField>& custom = {});

struct FiberSample {
    double t = 0.0;
    double energy = 0.0;
};

struct MountainPassProfile {
    std::vector<FiberSample> samples;
    double argmax_t = 0.0;       ///< grid maximizer refined by a parabola through its neighbours
    double t_star = 0.0;         ///< (||u||_s^2 / \int (u^+)^{p+1})^{1/(p-1)}
    double negative_t = 0.0;     ///< a t with F^+(t u) < 0
    double negative_energy = 0.0;
};

/// Fiber energy t -> F^+(t u). Throws DomainError when u^+ vanishes.
MountainPassProfile mountain_pass_profile(const RealField& u, double s, const SolverConfig& cfg,
                                          const std::vector<double>& t_grid);

} // namespace mixlap::solver
