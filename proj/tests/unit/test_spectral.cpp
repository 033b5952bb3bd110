#include "mixlap/errors.hpp"
#include "mixlap/field_io.hpp"
#include "mixlap/params.hpp"
#include "mixlap/spectral_field.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace mixlap;
using namespace mixlap::spectral;

namespace {
constexpr double pi = std::numbers::pi;

RealField random_smooth(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double a = normal(rng), b = normal(rng), c = normal(rng);
    return RealField::sample(g, [&](const double* x) {
        double v = a * std::exp(-x[0] * x[0]);
        for (int d = 1; d < g.n; ++d) v *= std::exp(-x[d] * x[d] / 2.0);
        return v + b * std::cos(pi * x[0] / g.L) + c * std::sin(2.0 * pi * x[g.n - 1] / g.L);
    });
}

double max_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}
} // namespace

TEST_SUITE("spectral_field") {

TEST_CASE("grid validation") {
    CHECK_THROWS_AS((GridSpec{4, 1.0, 16}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{2, 1.0, 15}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{2, 0.0, 16}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{3, 1.0, 1024}.validate()), DomainError);
    CHECK_NOTHROW((GridSpec{3, 1.0, 32}.validate()));
}

TEST_CASE("forward and inverse are mutually inverse; zero mode is the mean") {
    for (int n = 1; n <= 3; ++n) {
        const GridSpec g{n, 4.0, 16};
        const auto f = random_smooth(g, 10 + n);
        CHECK(max_diff(inverse(forward(f)), f) < 1e-13);
        double mean = 0.0;
        for (double v : f.data) mean += v;
        mean /= f.data.size();
        CHECK(forward(f).coeffs[0].real() == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("Fourier modes are eigenfunctions of the operator") {
    const GridSpec g{2, 5.0, 32};
    const int k = 3;
    const double xi = k / (2.0 * g.L);
    const auto mode = RealField::sample(g, [&](const double* x) { return std::cos(2.0 * pi * xi * x[0]); });
    const double s = 0.3;
    const double lambda = 1.0 + operator_symbol(xi, s);
    CHECK(max_diff(apply_operator(mode, s, true), lambda * mode) < 1e-12);
    CHECK(max_diff(apply_resolvent(mode, s), (1.0 / lambda) * mode) < 1e-13);
}

TEST_CASE("resolvent inverts the operator") {
    const GridSpec g{3, 4.0, 16};
    const auto f = random_smooth(g, 5);
    CHECK(max_diff(apply_resolvent(apply_operator(f, 0.6, true), 0.6), f) < 1e-12);
}

TEST_CASE("Parseval and energy norms") {
    const GridSpec g{2, 3.0, 32};
    const auto f = random_smooth(g, 7);
    const auto nr = norms(f, 0.5);
    CHECK(nr.l2 * nr.l2 == doctest::Approx(inner_product(f, f)).epsilon(1e-12));
    CHECK(energy_inner_product(f, f, 0.5)
          == doctest::Approx(nr.l2 * nr.l2 + nr.h1_seminorm * nr.h1_seminorm + nr.hs_seminorm * nr.hs_seminorm)
                 .epsilon(1e-12));
    CHECK(nr.sobolev_s * nr.sobolev_s == doctest::Approx(energy_inner_product(f, f, 0.5)).epsilon(1e-12));
    CHECK(lp_norm(f, 2.0) == doctest::Approx(nr.l2).epsilon(1e-12));
}

TEST_CASE("single-harmonic norms in symbol units") {
    const GridSpec g{2, 3.0, 32};
    const double amp = 0.7, xi = 4.0 / (2.0 * g.L);
    const auto f = RealField::sample(g, [&](const double* x) { return amp * std::cos(2.0 * pi * xi * x[1]); });
    const auto nr = norms(f, 0.4);
    const double box = g.box_volume();
    CHECK(nr.l2 * nr.l2 == doctest::Approx(amp * amp * box / 2.0).epsilon(1e-12));
    CHECK(nr.h1_seminorm * nr.h1_seminorm == doctest::Approx(amp * amp * xi * xi * box / 2.0).epsilon(1e-12));
    CHECK(nr.hs_seminorm * nr.hs_seminorm == doctest::Approx(amp * amp * std::pow(xi, 0.8) * box / 2.0).epsilon(1e-12));
    CHECK(nr.linf == doctest::Approx(amp));
}

TEST_CASE("property: the fractional seminorm is dominated by l2 and h1") {
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
        const GridSpec g{static_cast<int>(1 + seed % 3), 3.0, 16};
        const auto nr = norms(random_smooth(g, seed), 0.1 + 0.08 * (seed - 20));
        CHECK(nr.hs_seminorm * nr.hs_seminorm <= nr.l2 * nr.l2 + nr.h1_seminorm * nr.h1_seminorm);
    }
}

TEST_CASE("resampling up then down is the identity on band-limited data") {
    const GridSpec g{2, 3.0, 16};
    const auto f = random_smooth(g, 8);
    auto c = forward(f);
    for (std::size_t i = 0; i < c.coeffs.size(); ++i)
        if (c.is_nyquist(i)) c.coeffs[i] = 0.0;
    const auto band = inverse(c);
    const auto back = inverse(resample(resample(forward(band), 48), 16));
    CHECK(max_diff(back, band) < 1e-13);
}

}

TEST_SUITE("field_io") {

TEST_CASE("field files round-trip bit for bit") {
    const auto path = std::filesystem::temp_directory_path() / "mixlap-unit-field.bin";
    const GridSpec g{2, 2.5, 16};
    const auto f = random_smooth(g, 3);
    write_field(f, path);
    const auto back = read_field(path);
    CHECK(back.grid == g);
    CHECK(back.data == f.data);
}

TEST_CASE("truncated and malformed files are rejected") {
    const auto dir = std::filesystem::temp_directory_path();
    const GridSpec g{1, 1.0, 16};
    write_field(RealField(g, 1.0), dir / "mixlap-unit-trunc.bin");
    std::filesystem::resize_file(dir / "mixlap-unit-trunc.bin", std::filesystem::file_size(dir / "mixlap-unit-trunc.bin") - 8);
    CHECK_THROWS_AS(read_field(dir / "mixlap-unit-trunc.bin"), StructuralError);
    std::ofstream(dir / "mixlap-unit-bad.bin") << "not a header\n";
    CHECK_THROWS_AS(read_field(dir / "mixlap-unit-bad.bin"), StructuralError);
}

}
