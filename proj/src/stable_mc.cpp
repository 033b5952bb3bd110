#include "mixlap/stable_mc.hpp"

#include "mixlap/errors.hpp"
#include "mixlap/kernels.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

namespace mixlap::mc {

kernels::QuadratureResult reference_density_detailed(const SampleBatch& batch, double r,
                                                     const kernels::QuadratureSpec& quad) {
    const double t1 = batch.mode == MixtureMode::gaussian_only ? 0.0 : batch.t;
    const double t2 = batch.mode == MixtureMode::stable_only ? 0.0 : batch.t;
    return kernels::heat_kernel_two_scale_detailed(r, t1, t2, batch.params, quad);
}

namespace {

constexpr double pi = std::numbers::pi;

double open_unit(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double v = 0.0;
    do {
        v = u(rng);
    } while (v <= 0.0);
    return v;
}

void fill_sub_batch(const SampleBatch& spec, const SamplerConstants& c, std::size_t index,
                    double* out, std::size_t rows) {
    std::mt19937_64 rng(sub_seed(spec.seed, index));
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = spec.params.n;
    const double sigma = std::sqrt(c.gaussian_variance);
    const bool gaussian = spec.mode != MixtureMode::stable_only;
    const bool stable = spec.mode != MixtureMode::gaussian_only;
    for (std::size_t i = 0; i < rows; ++i) {
        double* x = out + i * static_cast<std::size_t>(n);
        for (int d = 0; d < n; ++d) x[d] = 0.0;
        if (gaussian) {
            for (int d = 0; d < n; ++d) x[d] += sigma * normal(rng);
        }
        if (stable) {
            const double root = std::sqrt(c.subordinator_scale * positive_stable(spec.params.s, rng));
            for (int d = 0; d < n; ++d) x[d] += root * normal(rng);
        }
    }
}

struct ShellMass {
    double value = 0.0;
    double error_estimate = 0.0;
};

// The density is smooth across a shell, so fixed Gauss-Legendre rules suffice; an
// adaptive rule would chase the noise of the inner oscillatory quadrature.
ShellMass shell_mass(const SampleBatch& batch, double lo, double hi,
                     const kernels::QuadratureSpec& quad) {
    using boost::math::quadrature::gauss;
    const int n = batch.params.n;
    const double area = kernels::unit_sphere_area(n);
    double inner_error = 0.0;
    auto integrand = [&](double r) {
        const auto v = reference_density_detailed(batch, r, quad);
        inner_error = std::max(inner_error, std::abs(v.error_estimate) * area * std::pow(r, n - 1));
        return area * std::pow(r, n - 1) * v.value;
    };
    const double fine = gauss<double, 20>::integrate(integrand, lo, hi);
    const double coarse = gauss<double, 10>::integrate(integrand, lo, hi);
    return {fine, std::abs(fine - coarse) + inner_error * (hi - lo)};
}

double shell_volume(int n, double lo, double hi) {
    return kernels::unit_sphere_area(n) * (std::pow(hi, n) - std::pow(lo, n)) / n;
}

} // namespace

std::string to_string(MixtureMode mode) {
    switch (mode) {
    case MixtureMode::mixed: return "mixed";
    case MixtureMode::gaussian_only: return "gaussian-only";
    case MixtureMode::stable_only: return "stable-only";
    }
    return "mixed";
}

MixtureMode mixture_mode_from_string(const std::string& name) {
    if (name == "mixed") return MixtureMode::mixed;
    if (name == "gaussian-only" || name == "gaussian_only") return MixtureMode::gaussian_only;
    if (name == "stable-only" || name == "stable_only") return MixtureMode::stable_only;
    throw DomainError("unknown mixture mode '" + name + "'");
}

SamplerConstants sampler_constants(double t, const KernelParams& params) {
    if (!(t > 0.0)) throw DomainError("sampling time must be positive");
    params.validate();
    const double s = params.s;
    SamplerConstants c;
    c.gaussian_variance = t / (2.0 * pi * pi);
    c.stable_laplace_scale = t / std::pow(2.0 * pi * pi, s);
    c.subordinator_scale = std::pow(c.stable_laplace_scale, 1.0 / s);
    return c;
}

double positive_stable(double s, std::mt19937_64& rng) {
    const double u = pi * open_unit(rng);
    const double e = -std::log(open_unit(rng));
    const double log_a = std::log(std::sin(s * u)) - std::log(std::sin(u)) / s
                         + (1.0 - s) / s * (std::log(std::sin((1.0 - s) * u)) - std::log(e));
    return std::exp(log_a);
}

std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SampleBatch::norm(std::size_t i) const {
    const int n = params.n;
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
        const double v = points[i * static_cast<std::size_t>(n) + d];
        r2 += v * v;
    }
    return std::sqrt(r2);
}

SampleBatch sample_mixed(double t, const KernelParams& params, std::size_t count,
                         std::uint64_t seed, MixtureMode mode, unsigned threads) {
    const SamplerConstants c = sampler_constants(t, params);
    SampleBatch batch;
    batch.t = t;
    batch.params = params;
    batch.count = count;
    batch.seed = seed;
    batch.mode = mode;
    batch.points.assign(count * static_cast<std::size_t>(params.n), 0.0);

    const std::size_t batches = (count + sub_batch_size - 1) / sub_batch_size;
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(batches, 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t b = next++; b < batches; b = next++) {
            try {
                const std::size_t first = b * sub_batch_size;
                const std::size_t rows = std::min(sub_batch_size, count - first);
                fill_sub_batch(batch, c, b,
                               batch.points.data() + first * static_cast<std::size_t>(params.n), rows);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return batch;
}

void write_batch_csv(const SampleBatch& batch, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open " + path.string() + " for writing");
    const int n = batch.params.n;
    for (int d = 0; d < n; ++d) out << (d ? "," : "") << "x" << (d + 1);
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < batch.count; ++i) {
        for (int d = 0; d < n; ++d) {
            std::snprintf(buf, sizeof buf, "%.17g", batch.points[i * static_cast<std::size_t>(n) + d]);
            if (d) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw DomainError("failed writing " + path.string());
}

double reference_density(const SampleBatch& batch, double r, const kernels::QuadratureSpec& quad) {
    return reference_density_detailed(batch, r, quad).value;
}

DensityReport compare_density(const SampleBatch& batch, const std::vector<double>& edges,
                              const kernels::QuadratureSpec& quad, double z_threshold,
                              double min_expected) {
    if (batch.count < 10000) {
        throw DomainError("statistical comparison needs at least 1e4 samples");
    }
    if (edges.size() < 2 || edges.front() < 0.0) {
        throw DomainError("compare_density needs at least two nonnegative shell edges");
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw DomainError("shell edges must increase");
    }
    const int n = batch.params.n;
    const std::size_t shells = edges.size() - 1;
    std::vector<std::size_t> hits(shells, 0);
    for (std::size_t i = 0; i < batch.count; ++i) {
        const double r = batch.norm(i);
        if (r < edges.front() || r >= edges.back()) continue;
        const auto it = std::upper_bound(edges.begin(), edges.end(), r);
        ++hits[static_cast<std::size_t>(it - edges.begin()) - 1];
    }

    const double count = static_cast<double>(batch.count);
    DensityReport report;
    double mass_quad_error = 0.0;
    std::size_t inside = 0;
    for (std::size_t k = 0; k < shells; ++k) {
        ShellComparison sh;
        sh.r_lo = edges[k];
        sh.r_hi = edges[k + 1];
        sh.hits = hits[k];
        inside += hits[k];
        const double vol = shell_volume(n, sh.r_lo, sh.r_hi);
        const ShellMass mass = shell_mass(batch, sh.r_lo, sh.r_hi, quad);
        report.reference_mass += mass.value;
        mass_quad_error += std::abs(mass.error_estimate);
        sh.expected_count = count * mass.value;
        sh.reference_density = mass.value / vol;
        sh.empirical_density = static_cast<double>(sh.hits) / (count * vol);
        const double p = mass.value;
        const double mc_se = std::sqrt(std::max(p * (1.0 - p), 0.0) / count) / vol;
        const double quad_se = std::abs(mass.error_estimate) / vol;
        sh.standard_error = std::hypot(mc_se, quad_se);
        sh.z_score = sh.standard_error > 0.0
                         ? (sh.empirical_density - sh.reference_density) / sh.standard_error
                         : 0.0;
        sh.excluded = sh.expected_count < min_expected;
        sh.pass = sh.excluded || std::abs(sh.z_score) <= z_threshold;
        report.shells.push_back(sh);
    }

    report.excluded = static_cast<std::size_t>(
        std::count_if(report.shells.begin(), report.shells.end(), [](const auto& s) { return s.excluded; }));
    report.pass = report.excluded < shells
                  && std::all_of(report.shells.begin(), report.shells.end(),
                                 [](const auto& s) { return s.pass; });

    report.empirical_mass = static_cast<double>(inside) / count;
    const double pm = report.reference_mass;
    report.mass_standard_error = std::hypot(std::sqrt(std::max(pm * (1.0 - pm), 0.0) / count),
                                            mass_quad_error);
    report.mass_pass = std::abs(report.empirical_mass - report.reference_mass)
                       <= z_threshold * std::max(report.mass_standard_error, 1e-300);

    // Three-point moving average over included shells, then a one-sided test.
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < shells; ++k) {
        if (!report.shells[k].excluded) kept.push_back(k);
    }
    std::vector<double> smooth(kept.size()), smooth_se(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
        const std::size_t a = j == 0 ? 0 : j - 1;
        const std::size_t b = std::min(j + 1, kept.size() - 1);
        double sum = 0.0, var = 0.0;
        for (std::size_t i = a; i <= b; ++i) {
            const auto& sh = report.shells[kept[i]];
            sum += sh.empirical_density;
            var += sh.standard_error * sh.standard_error;
        }
        const double m = static_cast<double>(b - a + 1);
        smooth[j] = sum / m;
        smooth_se[j] = std::sqrt(var) / m;
    }
    report.monotone = true;
    for (std::size_t j = 1; j < kept.size(); ++j) {
        if (smooth[j] > smooth[j - 1] + z_threshold * std::hypot(smooth_se[j], smooth_se[j - 1])) {
            report.monotone = false;
        }
    }
    return report;
}

std::vector<std::vector<double>> random_frequencies(int n, std::size_t count, std::uint64_t seed,
                                                    double lo, double hi) {
    if (n < 1 || !(lo >= 0.0) || !(hi >= lo)) throw DomainError("invalid frequency range");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> radius(lo, hi);
    std::vector<std::vector<double>> out;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> dir(static_cast<std::size_t>(n));
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& v : dir) {
                v = normal(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
        } while (norm == 0.0);
        const double r = radius(rng);
        for (double& v : dir) v *= r / norm;
        out.push_back(std::move(dir));
    }
    return out;
}

std::vector<CharFunctionSample> check_char_function(const SampleBatch& batch,
                                                    const std::vector<std::vector<double>>& xis,
                                                    double z_threshold) {
    if (batch.count < 10000) {
        throw DomainError("statistical comparison needs at least 1e4 samples");
    }
    const int n = batch.params.n;
    const double s = batch.params.s;
    std::vector<CharFunctionSample> out;
    for (const auto& xi : xis) {
        if (xi.size() != static_cast<std::size_t>(n)) {
            throw DomainError("frequency dimension differs from the batch dimension");
        }
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < batch.count; ++i) {
            double phase = 0.0;
            for (int d = 0; d < n; ++d) phase += xi[d] * batch.points[i * static_cast<std::size_t>(n) + d];
            const double c = std::cos(2.0 * pi * phase);
            sum += c;
            sum_sq += c * c;
        }
        const double count = static_cast<double>(batch.count);
        CharFunctionSample row;
        row.xi = xi;
        row.empirical = sum / count;
        const double var = std::max(sum_sq / count - row.empirical * row.empirical, 0.0);
        row.standard_error = std::sqrt(var / count);
        double r2 = 0.0;
        for (double v : xi) r2 += v * v;
        double exponent = 0.0;
        if (batch.mode != MixtureMode::stable_only) exponent += r2;
        if (batch.mode != MixtureMode::gaussian_only) exponent += std::pow(r2, s);
        row.symbol = std::exp(-batch.t * exponent);
        row.pass = std::abs(row.empirical - row.symbol) <= z_threshold * row.standard_error;
        out.push_back(std::move(row));
    }
    return out;
}

MeanCheck check_mean(const SampleBatch& batch, double z_threshold) {
    if (batch.count < 10000) {
        throw DomainError("statistical comparison needs at least 1e4 samples");
    }
    const int n = batch.params.n;
    const double count = static_cast<double>(batch.count);
    MeanCheck out;
    out.pass = true;
    for (int d = 0; d < n; ++d) {
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < batch.count; ++i) {
            const double v = batch.points[i * static_cast<std::size_t>(n) + d];
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / count;
        const double var = std::max(sum_sq / count - mean * mean, 0.0);
        const double se = std::sqrt(var / count);
        out.mean.push_back(mean);
        out.standard_error.push_back(se);
        if (std::abs(mean) > z_threshold * se) out.pass = false;
    }
    return out;
}

TailCheck check_tail(const SampleBatch& batch, double r_lo, double tolerance) {
    if (!(r_lo > 0.0)) throw DomainError("tail radius must be positive");
    std::vector<double> norms(batch.count);
    for (std::size_t i = 0; i < batch.count; ++i) norms[i] = batch.norm(i);
    std::sort(norms.begin(), norms.end());

    TailCheck out;
    out.expected_slope = -2.0 * batch.params.s;
    constexpr int points = 10;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < points; ++k) {
        const double r = r_lo * std::pow(10.0, static_cast<double>(k) / (points - 1));
        const auto above = static_cast<std::size_t>(norms.end() - std::upper_bound(norms.begin(), norms.end(), r));
        if (above == 0) {
            throw DomainError("no samples beyond tail radius " + std::to_string(r));
        }
        const double surv = static_cast<double>(above) / static_cast<double>(batch.count);
        out.radii.push_back(r);
        out.survival.push_back(surv);
        const double x = std::log(r), y = std::log(surv);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.slope = (points * sxy - sx * sy) / (points * sxx - sx * sx);
    out.pass = std::abs(out.slope - out.expected_slope) <= tolerance;
    return out;
}

nlohmann::json to_json(const DensityReport& report) {
    nlohmann::json doc;
    auto& rows = doc["shells"] = nlohmann::json::array();
    for (const auto& sh : report.shells) {
        rows.push_back({{"r_lo", sh.r_lo},
                        {"r_hi", sh.r_hi},
                        {"hits", sh.hits},
                        {"expected_count", sh.expected_count},
                        {"empirical_density", sh.empirical_density},
                        {"reference_density", sh.reference_density},
                        {"standard_error", sh.standard_error},
                        {"z_score", sh.z_score},
                        {"excluded", sh.excluded},
                        {"pass", sh.pass}});
    }
    doc["empirical_mass"] = report.empirical_mass;
    doc["reference_mass"] = report.reference_mass;
    doc["mass_standard_error"] = report.mass_standard_error;
    doc["mass_pass"] = report.mass_pass;
    doc["monotone"] = report.monotone;
    doc["excluded"] = report.excluded;
    doc["pass"] = report.pass;
    return doc;
}

nlohmann::json to_json(const std::vector<CharFunctionSample>& samples) {
    auto rows = nlohmann::json::array();
    for (const auto& row : samples) {
        rows.push_back({{"xi", row.xi},
                        {"empirical", row.empirical},
                        {"symbol", row.symbol},
                        {"standard_error", row.standard_error},
                        {"pass", row.pass}});
    }
    return rows;
}

nlohmann::json to_json(const TailCheck& tail) {
    return {{"radii", tail.radii},
            {"survival", tail.survival},
            {"slope", tail.slope},
            {"expected_slope", tail.expected_slope},
            {"pass", tail.pass}};
}

nlohmann::json to_json(const MeanCheck& mean) {
    return {{"mean", mean.mean}, {"standard_error", mean.standard_error}, {"pass", mean.pass}};
}

} // namespace mixlap::mc
