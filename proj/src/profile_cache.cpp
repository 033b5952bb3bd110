#include "mixlap/profile_cache.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace mixlap::kernels {

namespace {

std::string sanitize(const std::string& text) {
    std::string out;
    for (char c : text) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')
                          || c == '.' || c == '-' || c == '_';
        out += keep ? c : '_';
    }
    return out;
}

std::string temporary_suffix() {
    static std::atomic<unsigned> counter{0};
    std::ostringstream os;
    os << ".tmp." << ::getpid() << '.' << std::hash<std::thread::id>{}(std::this_thread::get_id())
       << '.' << counter.fetch_add(1);
    return os.str();
}

} // namespace

ProfileCache::ProfileCache(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::filesystem::path ProfileCache::default_directory() {
    if (const char* env = std::getenv("MIXLAP_CACHE_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".mixlap-cache";
}

std::string ProfileCache::key(const KernelSpec& spec, const KernelParams& params,
                              const QuadratureSpec& quad, const std::vector<double>& radii) const {
    char grid[32];
    std::snprintf(grid, sizeof grid, "%016llx",
                  static_cast<unsigned long long>(radius_grid_hash(radii)));
    std::ostringstream os;
    os.precision(17);
    os << spec.label() << "_rmin" << spec.r_min << "_n" << params.n << "_s" << params.s << "_"
       << quad.fingerprint() << "_" << grid;
    return sanitize(os.str());
}

std::optional<RadialProfile> ProfileCache::load(const KernelSpec& spec,
                                                const KernelParams& params,
                                                const QuadratureSpec& quad,
                                                const std::vector<double>& radii) const {
    const std::string stem = key(spec, params, quad, radii);
    const auto csv = directory_ / (stem + ".csv");
    const auto sidecar = directory_ / (stem + ".json");
    std::error_code ec;
    if (!std::filesystem::exists(csv, ec) || !std::filesystem::exists(sidecar, ec)) {
        return std::nullopt;
    }
    try {
        RadialProfile profile = read_profile_csv(csv);
        read_profile_sidecar(profile, sidecar);
        if (profile.radii != radii || profile.label != spec.label() || profile.params.n != params.n
            || profile.params.s != params.s) {
            return std::nullopt;
        }
        return profile;
    } catch (const std::exception&) {
        return std::nullopt; // unreadable entry; recomputed and overwritten
    }
}

void ProfileCache::store(const KernelSpec& spec, const RadialProfile& profile,
                         const QuadratureSpec& quad) const {
    std::filesystem::create_directories(directory_);
    const std::string stem = key(spec, profile.params, quad, profile.radii);
    const std::string suffix = temporary_suffix();
    const auto csv = directory_ / (stem + ".csv");
    const auto sidecar = directory_ / (stem + ".json");
    const auto csv_tmp = directory_ / (stem + ".csv" + suffix);
    const auto sidecar_tmp = directory_ / (stem + ".json" + suffix);
    write_profile_csv(profile, csv_tmp);
    write_profile_sidecar(profile, sidecar_tmp);
    std::filesystem::rename(csv_tmp, csv);
    std::filesystem::rename(sidecar_tmp, sidecar);
}

RadialProfile ProfileCache::get_or_tabulate(const KernelSpec& spec,
                                            const std::vector<double>& radii,
                                            const KernelParams& params,
                                            const QuadratureSpec& quad, unsigned threads) const {
    if (auto cached = load(spec, params, quad, radii)) {
        return *cached;
    }
    RadialProfile profile = tabulate(spec, radii, params, quad, threads);
    store(spec, profile, quad);
    return profile;
}

} // namespace mixlap::kernels
