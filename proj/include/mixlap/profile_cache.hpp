#pragma once

#include "mixlap/kernels.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mixlap::kernels {

/// On-disk memo of tabulated kernels keyed by (label, n, s, quadrature, radius grid).
///
/// Entries are written to a temporary name and renamed into place, so concurrent
/// writers of the same key leave one complete copy with identical content.
class ProfileCache {
public:
    explicit ProfileCache(std::filesystem::path directory = default_directory());

    /// $MIXLAP_CACHE_DIR when set, ./.mixlap-cache otherwise.
    static std::filesystem::path default_directory();

    const std::filesystem::path& directory() const noexcept { return directory_; }

    std::string key(const KernelSpec& spec, const KernelParams& params,
                    const QuadratureSpec& quad, const std::vector<double>& radii) const;

    std::optional<RadialProfile> load(const KernelSpec& spec, const KernelParams& params,
                                      const QuadratureSpec& quad,
                                      const std::vector<double>& radii) const;

    void store(const KernelSpec& spec, const RadialProfile& profile,
               const QuadratureSpec& quad) const;

    /// Cached profile when present, otherwise tabulates and stores it.
    RadialProfile get_or_tabulate(const KernelSpec& spec, const std::vector<double>& radii,
                                  const KernelParams& params, const QuadratureSpec& quad,
                                  unsigned threads = 0) const;

private:
    std::filesystem::path directory_;
};

} // namespace mixlap::kernels
