#include "mixlap/errors.hpp"
#include "mixlap/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mixlap::kernels;
using mixlap::AccuracyError;
using mixlap::DomainError;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_SUITE("quadrature") {

TEST_CASE("Gaussian is its own transform in every dimension") {
    for (int n = 1; n <= 3; ++n) {
        for (double x : {0.0, 0.3, 1.0, 1.7}) {
            if (n > 1 && x == 0.0) continue;
            const auto res = radial_fourier_inverse([](double r) { return std::exp(-pi * r * r); }, n, x, {});
            CAPTURE(n);
            CAPTURE(x);
            CHECK(res.value == doctest::Approx(std::exp(-pi * x * x)).epsilon(1e-9));
        }
    }
}

TEST_CASE("exponential symbol gives the Poisson kernel") {
    // P(x) = Gamma((n+1)/2) / pi^{(n+1)/2} (1 + |x|^2)^{-(n+1)/2}
    const double c[] = {0.0, 1.0 / pi, 0.5 / pi, 1.0 / (pi * pi)};
    for (int n = 1; n <= 3; ++n) {
        for (double x : {0.2, 1.0, 3.0, 10.0}) {
            const auto res = radial_fourier_inverse([](double r) { return std::exp(-2.0 * pi * r); }, n, x, {});
            CHECK(res.value == doctest::Approx(c[n] * std::pow(1.0 + x * x, -(n + 1) / 2.0)).epsilon(1e-8));
        }
    }
}

TEST_CASE("slowly decaying oscillatory symbol 1/(1+r^2)") {
    for (double x : {0.1, 0.5, 2.0}) {
        const auto one = radial_fourier_inverse([](double r) { return 1.0 / (1.0 + r * r); }, 1, x, {});
        CHECK(one.value == doctest::Approx(pi * std::exp(-2.0 * pi * x)).epsilon(1e-7));
        const auto three = radial_fourier_inverse([](double r) { return 1.0 / (1.0 + r * r); }, 3, x, {});
        CHECK(three.value == doctest::Approx(pi * std::exp(-2.0 * pi * x) / x).epsilon(1e-7));
    }
}

TEST_CASE("tail acceleration is needed for slow symbols under a small zero budget") {
    QuadratureSpec quad;
    quad.max_zeros = 50;
    quad.tail_accel = TailAccel::none;
    CHECK_THROWS_AS(radial_fourier_inverse([](double r) { return 1.0 / (1.0 + r); }, 1, 2.0, quad),
                    AccuracyError);
}

TEST_CASE("half-line integration") {
    CHECK(integrate_half_line([](double x) { return std::exp(-x); }, {}).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_half_line([](double x) { return std::exp(-x) / std::sqrt(x); }, {}).value
          == doctest::Approx(std::sqrt(pi)).epsilon(1e-9));
    CHECK(integrate_interval([](double x) { return x * x; }, 0.0, 3.0, 1e-12).value == doctest::Approx(9.0).epsilon(1e-13));
}

TEST_CASE("Wynn epsilon accelerates the alternating harmonic series") {
    WynnEpsilon wynn;
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
        sum += (k % 2 ? 1.0 : -1.0) / k;
        wynn.push(sum);
    }
    CHECK(std::abs(sum - std::log(2.0)) > 1e-2);
    CHECK(std::abs(wynn.estimate() - std::log(2.0)) < 1e-10);
}

TEST_CASE("unit sphere areas") {
    CHECK(unit_sphere_area(1) == doctest::Approx(2.0));
    CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * pi));
    CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * pi));
}

TEST_CASE("spec validation and names") {
    QuadratureSpec bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = {};
    bad.max_zeros = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    for (auto a : {TailAccel::none, TailAccel::alternating_series}) CHECK(tail_accel_from_string(to_string(a)) == a);
    CHECK_THROWS_AS(tail_accel_from_string("richardson"), DomainError);
    QuadratureSpec other;
    other.rel_tol = 1e-9;
    CHECK(other.fingerprint() != QuadratureSpec{}.fingerprint());
}

}
