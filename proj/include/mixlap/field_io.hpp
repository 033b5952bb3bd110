#pragma once

#include "mixlap/spectral_field.hpp"

#include <filesystem>

namespace mixlap::spectral {

/// Binary field file: one JSON header line {"n", "L", "N", "dtype": "f64le"} followed by
/// N^n little-endian 64-bit reals in row-major order.
void write_field(const RealField& field, const std::filesystem::path& path);
RealField read_field(const std::filesystem::path& path);

/// CSV `x,value` along one axis through the grid point `through` (flat index).
void write_axis_slice_csv(const RealField& field, int axis, std::size_t through,
                          const std::filesystem::path& path);

} // namespace mixlap::spectral
