#include "mixlap/errors.hpp"
#include "mixlap/stable_mc.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

using namespace mixlap;
using namespace mixlap::mc;

namespace {
constexpr double pi = std::numbers::pi;

// Fraction of |X| < r with its binomial z-score against `p_exact`.
double fraction_z(const SampleBatch& b, double r, double p_exact) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < b.count; ++i) hits += b.norm(i) < r;
    const double frac = static_cast<double>(hits) / b.count;
    return (frac - p_exact) / std::sqrt(p_exact * (1.0 - p_exact) / b.count);
}
} // namespace

TEST_SUITE("stable_mc") {

TEST_CASE("sampler constants follow from the characteristic function") {
    const auto c = sampler_constants(2.0, {2, 0.5});
    CHECK(c.gaussian_variance == doctest::Approx(2.0 / (2.0 * pi * pi)));
    CHECK(c.stable_laplace_scale == doctest::Approx(2.0 / std::sqrt(2.0 * pi * pi)));
    CHECK(c.subordinator_scale == doctest::Approx(std::pow(c.stable_laplace_scale, 2.0)));
    CHECK_THROWS_AS(sampler_constants(0.0, {2, 0.5}), DomainError);
}

TEST_CASE("positive 1/2-stable law matches the Levy distribution") {
    // E exp(-lambda A) = exp(-sqrt(lambda)) gives P(A <= a) = erfc(1 / (2 sqrt(a))).
    std::mt19937_64 rng(123);
    const int count = 100000;
    std::vector<double> draws(count);
    for (double& d : draws) d = positive_stable(0.5, rng);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < count; ++i) {
        const double cdf = std::erfc(0.5 / std::sqrt(draws[i]));
        ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / count), std::abs(cdf - static_cast<double>(i + 1) / count)});
    }
    CHECK(ks < 1.63 / std::sqrt(count)); // 1% level
}

TEST_CASE("positive stable Laplace transform for other orders") {
    std::mt19937_64 rng(5);
    for (double s : {0.25, 0.75}) {
        const int count = 200000;
        double acc = 0.0, acc2 = 0.0;
        for (int i = 0; i < count; ++i) {
            const double e = std::exp(-positive_stable(s, rng));
            acc += e;
            acc2 += e * e;
        }
        const double mean = acc / count;
        const double se = std::sqrt((acc2 / count - mean * mean) / count);
        CAPTURE(s);
        CHECK(std::abs(mean - std::exp(-1.0)) < 4.0 * se);
    }
}

TEST_CASE("sub-seeds are deterministic and distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(sub_seed(42, i));
    CHECK(seen.size() == 1000);
    CHECK(sub_seed(42, 7) == sub_seed(42, 7));
    CHECK(sub_seed(42, 7) != sub_seed(43, 7));
}

TEST_CASE("batches depend on the seed only, not on the thread count") {
    const auto a = sample_mixed(1.0, {3, 0.4}, 200000, 9, MixtureMode::mixed, 1);
    const auto b = sample_mixed(1.0, {3, 0.4}, 200000, 9, MixtureMode::mixed, 6);
    const auto c = sample_mixed(1.0, {3, 0.4}, 200000, 10, MixtureMode::mixed, 6);
    CHECK(a.points == b.points);
    CHECK(a.points != c.points);
    CHECK(a.points.size() == 3 * 200000);
}

TEST_CASE("Gaussian-only mode reproduces the Gaussian law") {
    // 2-d Gaussian with variance sigma^2 per coordinate: P(|X| < r) = 1 - exp(-r^2 / (2 sigma^2)).
    const double t = 0.8;
    const auto b = sample_mixed(t, {2, 0.5}, 400000, 3, MixtureMode::gaussian_only);
    const double sigma2 = t / (2.0 * pi * pi);
    for (double r : {0.1, 0.2, 0.4}) CHECK(std::abs(fraction_z(b, r, 1.0 - std::exp(-r * r / (2.0 * sigma2)))) < 4.0);
}

TEST_CASE("stable-only mode at s = 1/2 reproduces the Poisson kernel") {
    // n = 1: density 2t / (t^2 + 4 pi^2 x^2) is Cauchy with scale t / (2 pi).
    const double t = 1.5;
    const auto b = sample_mixed(t, {1, 0.5}, 400000, 4, MixtureMode::stable_only);
    const double gamma = t / (2.0 * pi);
    for (double r : {0.05, 0.2, 1.0, 5.0}) CHECK(std::abs(fraction_z(b, r, 2.0 * std::atan(r / gamma) / pi)) < 4.0);
    // n = 3: P(|X| < r) for the Poisson kernel c t (t'^2 + |x|^2)^{-2}, t' = gamma.
    const auto b3 = sample_mixed(t, {3, 0.5}, 400000, 5, MixtureMode::stable_only);
    for (double r : {0.1, 0.3, 1.0}) {
        const double u = r / gamma;
        const double p = (2.0 / pi) * (std::atan(u) - u / (1.0 + u * u));
        CHECK(std::abs(fraction_z(b3, r, p)) < 4.0);
    }
}

TEST_CASE("degenerate modes pass the density and characteristic-function checks") {
    std::vector<double> edges;
    for (int i = 0; i <= 10; ++i) edges.push_back(0.1 + 0.1 * i);
    for (auto mode : {MixtureMode::gaussian_only, MixtureMode::stable_only}) {
        const auto b = sample_mixed(1.0, {2, 0.5}, 500000, 2, mode);
        CHECK(compare_density(b, edges).pass);
        for (const auto& c : check_char_function(b, random_frequencies(2, 4, 3))) CHECK(c.pass);
    }
}

TEST_CASE("mean and tail of the mixed law") {
    const auto b = sample_mixed(1.0, {2, 0.5}, 1000000, 1);
    CHECK(check_mean(b).pass);
    const auto tail = check_tail(b, 10.0);
    CHECK(tail.expected_slope == doctest::Approx(-1.0));
    CHECK(tail.pass);
}

TEST_CASE("undersampled shells are excluded, small batches rejected") {
    const auto b = sample_mixed(1.0, {2, 0.5}, 20000, 8);
    const auto rep = compare_density(b, {0.2, 0.4, 30.0, 30.01});
    CHECK(rep.excluded >= 1);
    CHECK(rep.shells.back().excluded);
    CHECK_THROWS_AS(compare_density(sample_mixed(1.0, {2, 0.5}, 100, 8), {0.2, 0.4}), DomainError);
}

TEST_CASE("frequencies, mode names and CSV export") {
    for (const auto& xi : random_frequencies(3, 20, 1, 0.2, 0.7)) {
        const double r = std::hypot(xi[0], xi[1], xi[2]);
        CHECK(r >= 0.2 - 1e-12);
        CHECK(r <= 0.7 + 1e-12);
    }
    for (auto m : {MixtureMode::mixed, MixtureMode::gaussian_only, MixtureMode::stable_only})
        CHECK(mixture_mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(mixture_mode_from_string("cauchy"), DomainError);
    const auto path = std::filesystem::temp_directory_path() / "mixlap-unit-samples.csv";
    write_batch_csv(sample_mixed(1.0, {2, 0.5}, 10, 1), path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x1,x2");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 10);
}

}
