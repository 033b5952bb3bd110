#include "mixlap/spectral_field.hpp"

#include "mixlap/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

namespace mixlap::spectral {

namespace {

// FFTW's planner is not thread-safe; executing an existing plan on new arrays is.
std::mutex planner_mutex;

enum class Direction { forward, backward };

fftw_plan cached_plan(const GridSpec& grid, Direction direction) {
    static std::map<std::tuple<int, int, int>, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(planner_mutex);
    const auto key = std::make_tuple(grid.n, grid.N, static_cast<int>(direction));
    if (auto it = plans.find(key); it != plans.end()) {
        return it->second;
    }
    std::vector<int> dims(grid.n, grid.N);
    double* real = fftw_alloc_real(grid.size());
    fftw_complex* spec = fftw_alloc_complex(grid.spectral_size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = direction == Direction::forward
                         ? fftw_plan_dft_r2c(grid.n, dims.data(), real, spec, flags)
                         : fftw_plan_dft_c2r(grid.n, dims.data(), spec, real, flags);
    fftw_free(real);
    fftw_free(spec);
    if (plan == nullptr) {
        throw std::runtime_error("FFTW plan creation failed");
    }
    plans.emplace(key, plan);
    return plan;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) {
        throw StructuralError("grid mismatch between operands");
    }
}

std::size_t power(std::size_t base, int exponent) {
    std::size_t out = 1;
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

// Axis indices of a half-spectrum storage position.
void unravel_spectral(const GridSpec& grid, std::size_t flat, int* k) {
    const std::size_t last = static_cast<std::size_t>(grid.N / 2 + 1);
    k[grid.n - 1] = static_cast<int>(flat % last);
    flat /= last;
    for (int d = grid.n - 2; d >= 0; --d) {
        k[d] = static_cast<int>(flat % grid.N);
        flat /= grid.N;
    }
}

} // namespace

void GridSpec::validate(std::size_t max_points) const {
    if (n < 1 || n > 3) {
        throw DomainError("grid dimension must be 1, 2 or 3, got " + std::to_string(n));
    }
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw DomainError("grid half-width L must be positive");
    }
    if (N < 16 || N % 2 != 0) {
        throw DomainError("grid points per axis must be even and >= 16, got " + std::to_string(N));
    }
    if (static_cast<double>(power(N, n)) > static_cast<double>(max_points)) {
        throw DomainError("grid of " + std::to_string(N) + "^" + std::to_string(n)
                          + " points exceeds the memory budget");
    }
}

std::size_t GridSpec::size() const { return power(static_cast<std::size_t>(N), n); }

std::size_t GridSpec::spectral_size() const {
    return power(static_cast<std::size_t>(N), n - 1) * static_cast<std::size_t>(N / 2 + 1);
}

double GridSpec::cell_volume() const { return std::pow(spacing(), n); }

double GridSpec::box_volume() const { return std::pow(2.0 * L, n); }

RealField::RealField(const GridSpec& g, double value) : grid(g), data(g.size(), value) {}

RealField RealField::sample(const GridSpec& g, const std::function<double(const double*)>& f) {
    RealField out(g);
    int j[3] = {0, 0, 0};
    double x[3] = {0.0, 0.0, 0.0};
    for (std::size_t flat = 0; flat < out.data.size(); ++flat) {
        out.unravel(flat, j);
        for (int d = 0; d < g.n; ++d) x[d] = g.coordinate(j[d]);
        out.data[flat] = f(x);
    }
    return out;
}

std::size_t RealField::index(const int* j) const {
    std::size_t flat = 0;
    for (int d = 0; d < grid.n; ++d) {
        const int wrapped = ((j[d] % grid.N) + grid.N) % grid.N;
        flat = flat * grid.N + static_cast<std::size_t>(wrapped);
    }
    return flat;
}

void RealField::unravel(std::size_t flat, int* j) const {
    for (int d = grid.n - 1; d >= 0; --d) {
        j[d] = static_cast<int>(flat % grid.N);
        flat /= grid.N;
    }
}

double RealField::max() const { return *std::max_element(data.begin(), data.end()); }

double RealField::min() const { return *std::min_element(data.begin(), data.end()); }

std::size_t RealField::argmax() const {
    return static_cast<std::size_t>(std::max_element(data.begin(), data.end()) - data.begin());
}

void RealField::validate() const {
    if (data.size() != grid.size()) {
        throw StructuralError("field data length does not match its grid");
    }
    for (double v : data) {
        if (!std::isfinite(v)) throw StructuralError("field holds a non-finite value");
    }
}

RealField& RealField::operator+=(const RealField& other) {
    require_same_grid(grid, other.grid);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += other.data[i];
    return *this;
}

RealField& RealField::operator-=(const RealField& other) {
    require_same_grid(grid, other.grid);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= other.data[i];
    return *this;
}

RealField& RealField::operator*=(double factor) {
    for (double& v : data) v *= factor;
    return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double factor, RealField a) { return a *= factor; }

double SpectralCoeffs::frequency_norm(std::size_t flat) const {
    int k[3] = {0, 0, 0};
    unravel_spectral(grid, flat, k);
    double sum = 0.0;
    for (int d = 0; d < grid.n; ++d) {
        const int signed_k = d == grid.n - 1 ? k[d] : grid.signed_index(k[d]);
        sum += static_cast<double>(signed_k) * signed_k;
    }
    return std::sqrt(sum) / (2.0 * grid.L);
}

double SpectralCoeffs::parseval_weight(std::size_t flat) const {
    const std::size_t last = flat % static_cast<std::size_t>(grid.N / 2 + 1);
    return (last == 0 || last == static_cast<std::size_t>(grid.N / 2)) ? 1.0 : 2.0;
}

bool SpectralCoeffs::is_nyquist(std::size_t flat) const {
    int k[3] = {0, 0, 0};
    unravel_spectral(grid, flat, k);
    for (int d = 0; d < grid.n; ++d) {
        if (k[d] == grid.N / 2) return true;
    }
    return false;
}

SpectralCoeffs forward(const RealField& f) {
    f.grid.validate();
    if (f.data.size() != f.grid.size()) {
        throw StructuralError("field data length does not match its grid");
    }
    SpectralCoeffs out{f.grid, std::vector<std::complex<double>>(f.grid.spectral_size())};
    std::vector<double> input = f.data; // r2c may overwrite its input for n > 1
    fftw_execute_dft_r2c(cached_plan(f.grid, Direction::forward), input.data(),
                         reinterpret_cast<fftw_complex*>(out.coeffs.data()));
    const double scale = 1.0 / static_cast<double>(f.grid.size());
    for (auto& c : out.coeffs) c *= scale;
    return out;
}

RealField inverse(const SpectralCoeffs& c) {
    c.grid.validate();
    if (c.coeffs.size() != c.grid.spectral_size()) {
        throw StructuralError("coefficient array length does not match its grid");
    }
    std::vector<std::complex<double>> input = c.coeffs; // c2r destroys its input
    RealField out(c.grid);
    fftw_execute_dft_c2r(cached_plan(c.grid, Direction::backward),
                         reinterpret_cast<fftw_complex*>(input.data()), out.data.data());
    return out;
}

SpectralCoeffs multiply(SpectralCoeffs c, const std::function<double(double)>& symbol) {
    for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
        c.coeffs[i] *= symbol(c.frequency_norm(i));
    }
    return c;
}

RealField apply_multiplier(const RealField& f, const std::function<double(double)>& symbol) {
    return inverse(multiply(forward(f), symbol));
}

RealField apply_operator(const RealField& f, double s, bool include_identity) {
    const double shift = include_identity ? 1.0 : 0.0;
    return apply_multiplier(f, [s, shift](double r) {
        return shift + r * r + std::pow(r, 2.0 * s);
    });
}

RealField apply_resolvent(const RealField& f, double s) {
    return apply_multiplier(f, [s](double r) { return 1.0 / (1.0 + r * r + std::pow(r, 2.0 * s)); });
}

SpectralCoeffs resample(const SpectralCoeffs& c, int target_N) {
    GridSpec target = c.grid;
    target.N = target_N;
    target.validate();
    const int keep = std::min(c.grid.N, target_N) / 2; // modes with |k| < keep survive
    SpectralCoeffs out{target, std::vector<std::complex<double>>(target.spectral_size())};
    const int n = c.grid.n;
    int k[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < out.coeffs.size(); ++flat) {
        unravel_spectral(target, flat, k);
        std::size_t source = 0;
        bool inside = true;
        for (int d = 0; d < n; ++d) {
            int signed_k = d == n - 1 ? k[d] : target.signed_index(k[d]);
            if (std::abs(signed_k) >= keep) {
                inside = false;
                break;
            }
            const int extent = d == n - 1 ? c.grid.N / 2 + 1 : c.grid.N;
            const int stored = (d == n - 1 || signed_k >= 0) ? signed_k : signed_k + c.grid.N;
            source = source * static_cast<std::size_t>(extent) + static_cast<std::size_t>(stored);
        }
        if (inside) out.coeffs[flat] = c.coeffs[source];
    }
    return out;
}

Norms norms(const RealField& f, double s) {
    const SpectralCoeffs c = forward(f);
    const double box = f.grid.box_volume();
    double l2 = 0.0;
    double h1 = 0.0;
    double hs = 0.0;
    for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
        const double power = c.parseval_weight(i) * std::norm(c.coeffs[i]);
        const double r = c.frequency_norm(i);
        l2 += power;
        h1 += r * r * power;
        hs += (r > 0.0 ? std::pow(r, 2.0 * s) : 0.0) * power;
    }
    Norms out;
    out.l2 = std::sqrt(box * l2);
    out.h1_seminorm = std::sqrt(box * h1);
    out.hs_seminorm = std::sqrt(box * hs);
    out.linf = 0.0;
    for (double v : f.data) out.linf = std::max(out.linf, std::abs(v));
    out.sobolev_s = std::sqrt(box * (l2 + h1 + hs));
    return out;
}

double lp_norm(const RealField& f, double p) {
    if (!(p >= 1.0)) {
        throw DomainError("lp_norm needs p >= 1");
    }
    double sum = 0.0;
    for (double v : f.data) sum += std::pow(std::abs(v), p);
    return std::pow(f.grid.cell_volume() * sum, 1.0 / p);
}

double inner_product(const RealField& f, const RealField& g) {
    require_same_grid(f.grid, g.grid);
    double sum = 0.0;
    for (std::size_t i = 0; i < f.data.size(); ++i) sum += f.data[i] * g.data[i];
    return f.grid.cell_volume() * sum;
}

double energy_inner_product(const RealField& f, const RealField& g, double s) {
    require_same_grid(f.grid, g.grid);
    const SpectralCoeffs cf = forward(f);
    const SpectralCoeffs cg = forward(g);
    double sum = 0.0;
    for (std::size_t i = 0; i < cf.coeffs.size(); ++i) {
        const double r = cf.frequency_norm(i);
        const double symbol = 1.0 + r * r + (r > 0.0 ? std::pow(r, 2.0 * s) : 0.0);
        sum += cf.parseval_weight(i) * symbol * std::real(std::conj(cf.coeffs[i]) * cg.coeffs[i]);
    }
    return f.grid.box_volume() * sum;
}

std::string fft_backend_version() { return fftw_version; }

} // namespace mixlap::spectral
