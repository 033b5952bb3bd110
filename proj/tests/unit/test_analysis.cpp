#include "mixlap/analysis.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/kernels.hpp"
#include "mixlap/special_fn.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mixlap;
using namespace mixlap::analysis;

namespace {
constexpr double pi = std::numbers::pi;

std::size_t center_index(const RealField& u) {
    int j[3] = {u.grid.N / 2, u.grid.N / 2, u.grid.N / 2};
    return u.index(j);
}
} // namespace

TEST_SUITE("analysis") {

TEST_CASE("radial average of a radial Gaussian") {
    const spectral::GridSpec g{2, 8.0, 128};
    const auto u = RealField::sample(g, [](const double* x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 8.0); });
    const auto prof = radial_average(u, center_index(u));
    CHECK(prof.values.front() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < prof.radii.size(); i += 5) {
        const double r = prof.radii[i];
        CHECK(std::abs(prof.values[i] - std::exp(-r * r / 8.0)) < 5e-3);
    }
}

TEST_CASE("symmetry deviation separates radial and anisotropic fields") {
    const spectral::GridSpec g{3, 4.0, 32};
    const auto radial = RealField::sample(g, [](const double* x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
    CHECK(symmetry_deviation(radial) < 1e-14);
    const auto skewed = RealField::sample(g, [](const double* x) { return std::exp(-(2.0 * x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
    CHECK(symmetry_deviation(skewed) > 1e-2);
}

TEST_CASE("dipole perturbation is measured at its amplitude") {
    const spectral::GridSpec g{2, 6.0, 64};
    const double eps = 1e-3;
    const auto u = RealField::sample(g, [&](const double* x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return std::exp(-r2) + eps * x[0] * std::exp(-r2 / 2.0) / std::exp(-0.5);
    });
    const double dev = symmetry_deviation(u, center_index(u));
    CHECK(dev >= 0.5 * eps / u.max());
    CHECK(dev <= 2.0 * eps / u.max());
}

TEST_CASE("radial average of constants, spikes and a painted kernel") {
    const spectral::GridSpec g{2, 4.0, 64};
    const auto flat = radial_average(RealField(g, 2.5), 0);
    for (double v : flat.values) CHECK(v == doctest::Approx(2.5));

    RealField spike(g, 0.0);
    const int c[2] = {32, 32}, at[2] = {32 + 7, 32};
    spike.data[spike.index(at)] = 1.0;
    const auto prof = radial_average(spike, spike.index(c));
    const auto peak = std::max_element(prof.values.begin(), prof.values.end()) - prof.values.begin();
    CHECK(prof.radii[peak] == doctest::Approx(7.0 * g.spacing()).epsilon(0.05));

    // Bessel kernel painted onto the grid away from its singular center.
    const KernelParams params{2, 0.5};
    const auto table = kernels::tabulate(kernels::KernelSpec::bessel_kernel(), kernels::log_spaced(0.05, 6.0, 200), params);
    const auto painted = RealField::sample(g, [&](const double* x) {
        return table.interpolate(std::max(std::hypot(x[0], x[1]), 0.05));
    });
    const auto avg = radial_average(painted, painted.index(c));
    for (std::size_t i = 0; i < avg.radii.size(); ++i) {
        if (avg.radii[i] < 1.0 || avg.radii[i] > 3.5) continue;
        CHECK(std::abs(avg.values[i] - table.interpolate(avg.radii[i])) < 1e-3);
    }
}

TEST_CASE("decay fit recovers an exact power law") {
    RadialProfile p;
    p.params = {2, 0.5};
    for (int i = 1; i <= 40; ++i) {
        p.radii.push_back(i * 0.5);
        p.values.push_back(0.7 * std::pow(i * 0.5, -3.0));
    }
    const auto fit = decay_fit(p, 4.0, 18.0);
    CHECK(fit.slope == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(fit.expected_slope == doctest::Approx(-3.0));
    CHECK(fit.c1 == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.c2 == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(decay_fit(p, 4.0, 5.0), DomainError);
}

TEST_CASE("decay length and centered slopes") {
    RadialProfile p;
    for (int i = 0; i <= 100; ++i) {
        p.radii.push_back(i * 0.05);
        p.values.push_back(std::exp(-i * 0.05));
    }
    CHECK(decay_length(p) == doctest::Approx(1.0).epsilon(1e-3));
    std::vector<double> r{1.0, 2.0, 4.0, 8.0}, f{1.0, 0.25, 0.0625, 1.0 / 64.0};
    for (double slope : centered_log_slopes(r, f)) CHECK(slope == doctest::Approx(-2.0));
}

TEST_CASE("ball volumes and sphere-ball overlaps") {
    CHECK(ball_volume(1, 0.5) == doctest::Approx(1.0));
    CHECK(ball_volume(2, 0.5) == doctest::Approx(pi / 4.0));
    CHECK(ball_volume(3, 0.5) == doctest::Approx(pi / 6.0));
    // Spherical cap of a sphere of radius rho at distance r from the center of B_a, n = 3.
    const double a = 0.5;
    for (double r : {1.0, 2.5}) {
        for (double rho : {r - 0.4, r, r + 0.3}) {
            const double cap = pi * rho * (a * a - (r - rho) * (r - rho)) / r;
            CHECK(sphere_ball_overlap(3, r, rho) == doctest::Approx(cap).epsilon(1e-12));
        }
        CHECK(sphere_ball_overlap(3, r, r + 0.6) == 0.0);
    }
    // Integrating overlaps over rho recovers the ball volume.
    for (int n = 1; n <= 3; ++n) {
        const double r = 1.3;
        const auto res = kernels::integrate_interval([&](double rho) { return sphere_ball_overlap(n, r, rho); },
                                                     r - a, r + a, 1e-12);
        CHECK(res.value == doctest::Approx(ball_volume(n, a)).epsilon(1e-8));
    }
}

TEST_CASE("ball convolution against a Hankel-transform oracle") {
    // K(x) = exp(-pi |x|^2) has K^ = exp(-pi |xi|^2); the indicator of B_{1/2} has
    // transform (1/2)^{n/2} J_{n/2}(pi |xi|) / |xi|^{n/2}.
    for (int n = 1; n <= 3; ++n) {
        RadialProfile kernel;
        kernel.params = {n, 0.5};
        kernel.radii = kernels::log_spaced(0.5, 6.0, 3000);
        for (double r : kernel.radii) kernel.values.push_back(std::exp(-pi * r * r));
        const std::vector<double> radii{1.0, 1.5, 2.5};
        const auto conv = ball_convolution(kernel, radii, 1e-12);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const auto oracle = kernels::radial_fourier_inverse(
                [n](double rho) {
                    if (rho < 1e-6) return std::pow(pi / 4.0, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
                    return std::exp(-pi * rho * rho) * std::pow(0.5, n / 2.0)
                           * special::bessel_j(special::BesselOrder(n / 2.0), pi * rho) / std::pow(rho, n / 2.0);
                },
                n, radii[i], {});
            CAPTURE(n);
            CAPTURE(radii[i]);
            CHECK(conv.values[i] == doctest::Approx(oracle.value).epsilon(1e-5));
        }
    }
}

TEST_CASE("positivity audit and discrete second differences") {
    const spectral::GridSpec g{1, 5.0, 64};
    const double w = 2.0 * pi * 3.0 / 10.0;
    const auto u = RealField::sample(g, [&](const double* x) { return std::cos(w * x[0]); });
    const double h = g.spacing();
    CHECK(second_difference_sup(u) == doctest::Approx((2.0 - 2.0 * std::cos(w * h)) / (h * h)).epsilon(1e-10));
    CHECK_FALSE(positivity_audit(u).pass);
    CHECK(positivity_audit(RealField(g, 0.1)).pass);
}

TEST_CASE("barrier suite at n = 1") {
    const auto radii = kernels::log_spaced(2.0, 20.0, 10);
    const auto suite = barrier_suite({1, 0.5}, {}, radii);
    CHECK(suite.pass);
    CHECK(suite.c1 > 0.0);
    CHECK(std::isfinite(suite.c2));
}

}
