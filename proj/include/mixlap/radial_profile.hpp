#pragma once

#include "mixlap/params.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mixlap {

/// Tabulated radially symmetric function.
struct RadialProfile {
    std::vector<double> radii;
    std::vector<double> values;
    KernelParams params;
    std::string label;
    /// Fingerprint of the quadrature settings that produced the values (may be empty).
    std::string quad;
    /// Indices whose values come from extrapolation below the tabulation floor.
    std::vector<std::size_t> extrapolated;

    /// Throws StructuralError on length mismatch, unsorted radii or non-finite values.
    void validate() const;

    /// Log-log interpolation for positive data, linear otherwise. Outside the
    /// tabulated range the end intervals are extended.
    double interpolate(double r) const;

    bool nonnegative() const;
    bool nonincreasing(double rel_slack = 0.0) const;
};

/// CSV `radius,value` with values printed at full precision.
void write_profile_csv(const RadialProfile& profile, const std::filesystem::path& path);
RadialProfile read_profile_csv(const std::filesystem::path& path);

/// JSON sidecar {label, n, s, quad, generated-at, extrapolated}.
void write_profile_sidecar(const RadialProfile& profile, const std::filesystem::path& path);
/// Reads the sidecar back into an existing profile's metadata.
void read_profile_sidecar(RadialProfile& profile, const std::filesystem::path& path);

/// 64-bit FNV-1a hash of the bit patterns of a radius grid.
std::uint64_t radius_grid_hash(const std::vector<double>& radii);

} // namespace mixlap
