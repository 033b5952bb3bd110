#include "mixlap/analysis.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/groundstate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace mixlap;
using namespace mixlap::solver;

namespace {
SolverConfig cubic() {
    SolverConfig cfg;
    cfg.p = 3.0;
    return cfg;
}
} // namespace

TEST_SUITE("groundstate") {

TEST_CASE("admissible exponents") {
    CHECK(critical_exponent(3) == doctest::Approx(5.0));
    CHECK(std::isinf(critical_exponent(1)));
    CHECK(std::isinf(critical_exponent(2)));
    SolverConfig cfg;
    cfg.p = 5.0;
    CHECK_THROWS_AS(cfg.validate(3), DomainError);
    CHECK_NOTHROW(cfg.validate(2));
    cfg.p = 1.0;
    CHECK_THROWS_AS(cfg.validate(1), DomainError);
    cfg = cubic();
    cfg.tol_residual = 0.0;
    CHECK_THROWS_AS(cfg.validate(2), DomainError);
}

TEST_CASE("derived settings") {
    auto cfg = cubic();
    CHECK(cfg.gamma() == doctest::Approx(1.5));
    CHECK(cfg.padding_factor() == 2);
    cfg.p = 2.5;
    CHECK(cfg.padding_factor() == 1);
    cfg.p = 5.0;
    CHECK(cfg.padding_factor() == 3);
    for (auto k : {InitKind::gaussian_bump, InitKind::custom_field}) CHECK(init_kind_from_string(to_string(k)) == k);
}

TEST_CASE("initial bump peaks at the box center") {
    const GridSpec g{2, 8.0, 32};
    const auto u = initial_guess(g, cubic());
    int j[2];
    u.unravel(u.argmax(), j);
    CHECK(j[0] == 16);
    CHECK(j[1] == 16);
    CHECK(u.max() == doctest::Approx(1.0));
}

TEST_CASE("a nonpositive iterate is degenerate") {
    const GridSpec g{1, 4.0, 32};
    CHECK_THROWS_AS(petviashvili_step(RealField(g, -1.0), 0.5, cubic()), DegenerateIterateError);
    CHECK_THROWS_AS(mountain_pass_profile(RealField(g, -1.0), 0.5, cubic(), {0.5, 1.0}), DomainError);
}

TEST_CASE("two-dimensional ground state: converged, positive core, Nehari, lattice symmetric") {
    const GridSpec g{2, 10.0, 128};
    const KernelParams params{2, 0.5};
    const auto [u, rep] = solve_ground_state(g, params, cubic());
    REQUIRE(rep.converged);
    CHECK(rep.residual_linf < 1e-10);
    CHECK(rep.nehari_gap / rep.norm_s_squared < 1e-10);
    CHECK(rep.max_value > 0.0);
    // The discrete problem is invariant under the symmetries of the square lattice about the
    // center, so the computed state must be too.
    double worst = 0.0;
    for (int a = 1; a < g.N; ++a) {
        for (int b = 1; b < g.N; ++b) {
            const int j[2] = {a, b}, swapped[2] = {b, a}, flipped[2] = {g.N - a, b};
            worst = std::max({worst, std::abs(u.data[u.index(j)] - u.data[u.index(swapped)]),
                              std::abs(u.data[u.index(j)] - u.data[u.index(flipped)])});
        }
    }
    CHECK(worst < 1e-12 * rep.max_value);
    const auto mp = mountain_pass_profile(u, 0.5, cubic(), {0.5, 0.9, 0.99, 1.0, 1.01, 1.1, 2.0, 3.0});
    CHECK(mp.t_star == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(mp.argmax_t == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(mp.negative_energy < 0.0);
    CHECK(rep.energy == doctest::Approx(0.25 * rep.nonlinear_integral).epsilon(1e-8));
}

TEST_CASE("solves are deterministic and restart from a converged field immediately") {
    const GridSpec g{2, 10.0, 64};
    const KernelParams params{2, 0.5};
    auto noisy = cubic();
    noisy.perturbation = 0.05;
    noisy.seed = 11;
    noisy.max_iter = 20;
    const auto [a, ra] = solve_ground_state(g, params, noisy);
    const auto [b, rb] = solve_ground_state(g, params, noisy);
    CHECK(a.data == b.data);
    CHECK(ra.stabilizer_history == rb.stabilizer_history);
    noisy.seed = 12;
    CHECK(solve_ground_state(g, params, noisy).first.data != a.data);

    const auto [u, ru] = solve_ground_state(g, params, cubic());
    REQUIRE(ru.converged);
    auto restart = cubic();
    restart.init = InitKind::custom_field;
    const auto [c, rc] = solve_ground_state(g, params, restart, u);
    CHECK(rc.converged);
    CHECK(rc.iterations <= 2);
    CHECK_THROWS_AS(solve_ground_state(g, params, restart), DomainError);
    CHECK_THROWS_AS(solve_ground_state({3, 10.0, 16}, params, cubic()), StructuralError);
    CHECK_THROWS_AS(solve_ground_state({1, 10.0, 64}, {1, 0.5}, cubic()), DomainError);
}

TEST_CASE("iteration budget exhaustion is reported, not thrown") {
    auto cfg = cubic();
    cfg.max_iter = 2;
    const auto [u, rep] = solve_ground_state({2, 10.0, 32}, {2, 0.5}, cfg);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 2);
    CHECK(rep.stabilizer_history.size() == 2);
}

TEST_CASE("translation by whole cells commutes with the solver") {
    const GridSpec g{2, 10.0, 64};
    auto cfg = cubic();
    const auto [u, ru] = solve_ground_state(g, {2, 0.4}, cfg);
    cfg.bump_shift = {5, -3, 0};
    const auto [v, rv] = solve_ground_state(g, {2, 0.4}, cfg);
    REQUIRE(ru.converged);
    REQUIRE(rv.converged);
    double diff = 0.0;
    for (int a = 0; a < g.N; ++a) {
        for (int b = 0; b < g.N; ++b) {
            const int j[2] = {a, b}, moved[2] = {(a + 5) % g.N, (b - 3 + g.N) % g.N};
            diff = std::max(diff, std::abs(v.data[v.index(moved)] - u.data[u.index(j)]));
        }
    }
    CHECK(diff < 1e-9);
}

TEST_CASE("dealiased and plain nonlinear integrals agree for a resolved field") {
    const GridSpec g{2, 8.0, 64};
    const auto u = initial_guess(g, cubic());
    auto plain = cubic();
    plain.dealias = false;
    CHECK(nonlinear_integral(u, cubic()) == doctest::Approx(nonlinear_integral(u, plain)).epsilon(1e-10));
}

}
