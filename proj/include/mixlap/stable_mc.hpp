#pragma once

#include "mixlap/params.hpp"
#include "mixlap/quadrature.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace mixlap::mc {

/// Which components of X = G + S are drawn.
enum class MixtureMode { mixed, gaussian_only, stable_only };

std::string to_string(MixtureMode mode);
MixtureMode mixture_mode_from_string(const std::string& name);

/// Sampler constants fixed by E exp(2 pi i xi.X) = exp(-t |xi|^2 - t |xi|^{2s}).
///
/// Gaussian part: each coordinate N(0, sigma^2) with sigma^2 = t / (2 pi^2), since
/// exp(-sigma^2 |2 pi xi|^2 / 2) = exp(-t |xi|^2).
///
/// Stable part: S = sqrt(A) Z with Z standard normal and A = c^{1/s} A0, where A0 is the
/// positive s-stable law with E exp(-lambda A0) = exp(-lambda^s). Then
/// E exp(i theta.S) = exp(-c (|theta|^2 / 2)^s), and theta = 2 pi xi requires
/// c = t / (2 pi^2)^s.
struct SamplerConstants {
    double gaussian_variance = 0.0;
    double stable_laplace_scale = 0.0; ///< c
    double subordinator_scale = 0.0;   ///< c^{1/s}
};

SamplerConstants sampler_constants(double t, const KernelParams& params);

/// Draw of A0 by the Chambers-Mallows-Stuck construction, which for total skew reduces to
///   A0 = sin(s U) / sin(U)^{1/s} * (sin((1 - s) U) / E)^{(1 - s)/s},
/// U uniform on (0, pi), E standard exponential.
double positive_stable(double s, std::mt19937_64& rng);

/// Seed of sub-batch `index`: output number index + 1 of SplitMix64 started at `master`.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index);

/// Samples per sub-batch; fixed so that results do not depend on the thread count.
inline constexpr std::size_t sub_batch_size = 65536;

struct SampleBatch {
    double t = 1.0;
    KernelParams params;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    MixtureMode mode = MixtureMode::mixed;
    /// count x n positions, row-major.
    std::vector<double> points;

    double norm(std::size_t i) const;
};

SampleBatch sample_mixed(double t, const KernelParams& params, std::size_t count,
                         std::uint64_t seed, MixtureMode mode = MixtureMode::mixed,
                         unsigned threads = 0);

void write_batch_csv(const SampleBatch& batch, const std::filesystem::path& path);

/// Density the batch is drawn from, evaluated at |x| = r.
double reference_density(const SampleBatch& batch, double r, const kernels::QuadratureSpec& quad);
kernels::QuadratureResult reference_density_detailed(const SampleBatch& batch, double r,
                                                     const kernels::QuadratureSpec& quad);

struct ShellComparison {
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::size_t hits = 0;
    double expected_count = 0.0;
    double empirical_density = 0.0;
    double reference_density = 0.0; ///< shell average of the quadrature density
    double standard_error = 0.0;
    double z_score = 0.0;
    bool excluded = false; ///< expected count below the minimum
    bool pass = true;
};

struct DensityReport {
    std::vector<ShellComparison> shells;
    double empirical_mass = 0.0; ///< fraction of samples inside the outermost shell edge
    double reference_mass = 0.0;
    double mass_standard_error = 0.0;
    bool mass_pass = false;
    bool monotone = false;   ///< smoothed shell densities nonincreasing within 3 standard errors
    std::size_t excluded = 0;
    bool pass = false;       ///< every included shell within the z threshold
};

/// Shell histogram against the quadrature density on shells [edges[i], edges[i+1]).
DensityReport compare_density(const SampleBatch& batch, const std::vector<double>& edges,
                              const kernels::QuadratureSpec& quad = {}, double z_threshold = 3.0,
                              double min_expected = 50.0);

struct CharFunctionSample {
    std::vector<double> xi;
    double empirical = 0.0;
    double symbol = 0.0;
    double standard_error = 0.0;
    bool pass = false;
};

/// Empirical E cos(2 pi xi.X) against the symbol exp(-t(|xi|^2 + |xi|^{2s})) (with the
/// disabled component removed in degenerate modes).
std::vector<CharFunctionSample> check_char_function(const SampleBatch& batch,
                                                    const std::vector<std::vector<double>>& xis,
                                                    double z_threshold = 3.0);

/// `count` frequency vectors with |xi| uniform in [lo, hi] and uniform directions.
std::vector<std::vector<double>> random_frequencies(int n, std::size_t count, std::uint64_t seed,
                                                    double lo = 0.1, double hi = 1.0);

struct MeanCheck {
    std::vector<double> mean;
    std::vector<double> standard_error;
    bool pass = false;
};

MeanCheck check_mean(const SampleBatch& batch, double z_threshold = 3.0);

struct TailCheck {
    std::vector<double> radii;
    std::vector<double> survival;
    double slope = 0.0;
    double expected_slope = 0.0; ///< -2s
    bool pass = false;
};

/// Log-log slope of P(|X| > R) over one decade [r_lo, 10 r_lo].
TailCheck check_tail(const SampleBatch& batch, double r_lo, double tolerance = 0.15);

nlohmann::json to_json(const DensityReport& report);
nlohmann::json to_json(const std::vector<CharFunctionSample>& samples);
nlohmann::json to_json(const TailCheck& tail);
nlohmann::json to_json(const MeanCheck& mean);

} // namespace mixlap::mc
