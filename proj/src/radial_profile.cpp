#include "mixlap/radial_profile.hpp"

#include "mixlap/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace mixlap {

void RadialProfile::validate() const {
    if (radii.size() != values.size()) {
        throw StructuralError("radial profile: radii and values differ in length");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 0.0) || !std::isfinite(radii[i])) {
            throw StructuralError("radial profile: radii must be finite and nonnegative");
        }
        if (i > 0 && !(radii[i] > radii[i - 1])) {
            throw StructuralError("radial profile: radii must be strictly increasing");
        }
        if (!std::isfinite(values[i])) {
            throw StructuralError("radial profile: non-finite value at radius "
                                  + std::to_string(radii[i]));
        }
    }
}

double RadialProfile::interpolate(double r) const {
    const std::size_t count = radii.size();
    if (count == 0) {
        throw StructuralError("radial profile: interpolation on an empty profile");
    }
    if (count == 1) return values.front();
    auto upper = std::upper_bound(radii.begin(), radii.end(), r);
    std::size_t hi = static_cast<std::size_t>(upper - radii.begin());
    hi = std::clamp<std::size_t>(hi, 1, count - 1);
    const std::size_t lo = hi - 1;
    const double r0 = radii[lo];
    const double r1 = radii[hi];
    const double v0 = values[lo];
    const double v1 = values[hi];
    if (r0 > 0.0 && r > 0.0 && v0 > 0.0 && v1 > 0.0) {
        const double w = std::log(r / r0) / std::log(r1 / r0);
        return std::exp((1.0 - w) * std::log(v0) + w * std::log(v1));
    }
    const double w = (r - r0) / (r1 - r0);
    return (1.0 - w) * v0 + w * v1;
}

bool RadialProfile::nonnegative() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
}

bool RadialProfile::nonincreasing(double rel_slack) const {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[i - 1] + rel_slack * std::abs(values[i - 1])) return false;
    }
    return true;
}

void write_profile_csv(const RadialProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << "radius,value\n";
    char line[96];
    for (std::size_t i = 0; i < profile.radii.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", profile.radii[i], profile.values[i]);
        out << line;
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

RadialProfile read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    RadialProfile profile;
    std::string line;
    std::getline(in, line);
    if (line.rfind("radius,value", 0) != 0) {
        throw StructuralError(path.string() + ": missing 'radius,value' header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw StructuralError(path.string() + ": malformed line '" + line + "'");
        }
        profile.radii.push_back(std::stod(line.substr(0, comma)));
        profile.values.push_back(std::stod(line.substr(comma + 1)));
    }
    profile.validate();
    return profile;
}

void write_profile_sidecar(const RadialProfile& profile, const std::filesystem::path& path) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

    nlohmann::json doc;
    doc["label"] = profile.label;
    doc["n"] = profile.params.n;
    doc["s"] = profile.params.s;
    doc["quad"] = profile.quad;
    doc["generated-at"] = stamp;
    doc["extrapolated"] = profile.extrapolated;
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << doc.dump(2) << '\n';
}

void read_profile_sidecar(RadialProfile& profile, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    const nlohmann::json doc = nlohmann::json::parse(in);
    profile.label = doc.at("label").get<std::string>();
    profile.params.n = doc.at("n").get<int>();
    profile.params.s = doc.at("s").get<double>();
    profile.quad = doc.value("quad", std::string{});
    profile.extrapolated = doc.value("extrapolated", std::vector<std::size_t>{});
}

std::uint64_t radius_grid_hash(const std::vector<double>& radii) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (double r : radii) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &r, sizeof bits);
        for (int byte = 0; byte < 8; ++byte) {
            hash ^= (bits >> (8 * byte)) & 0xffU;
            hash *= 1099511628211ULL;
        }
    }
    return hash;
}

} // namespace mixlap
