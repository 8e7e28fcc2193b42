#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "scmix/solver.hpp"
#include "scmix/spectral.hpp"

using namespace scmix;

namespace {

/// Closed-form semicircle density of radius 2*sqrt(K): sqrt(4K - x^2)/(2 pi K).
double semicircle_density(double K, double x) {
    const double r2 = 4.0 * K - x * x;
    return r2 <= 0.0 ? 0.0 : std::sqrt(r2) / (2.0 * kPi * K);
}

VarianceProfile random_profile(std::mt19937_64& gen, int d, double lo = 0.0, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> entries(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const double a = u(gen);
            entries[static_cast<std::size_t>(i) * d + j] = a;
            entries[static_cast<std::size_t>(j) * d + i] = a;
        }
    return VarianceProfile(d, entries);
}

}  // namespace

TEST_CASE("eta evaluates the squared-profile row sums", "[solver]") {
    SECTION("all-ones profile doubles the identity") {
        const auto a = VarianceProfile::constant(2, 1.0);
        const auto out = eta(a, ComplexDiagonal::identity(2));
        REQUIRE(out[0] == cplx(2, 0));
        REQUIRE(out[1] == cplx(2, 0));
    }
    SECTION("direct formula on a 2x2 profile") {
        const auto a = VarianceProfile::from_rows({{1, 2}, {2, 3}});
        const ComplexDiagonal d(std::vector<cplx>{cplx(0, 1), cplx(0, -1)});
        const auto out = eta(a, d);
        REQUIRE(out[0] == cplx(0, -3));  // 1*i + 4*(-i)
        REQUIRE(out[1] == cplx(0, -5));  // 4*i + 9*(-i)
    }
    SECTION("identity profile is the identity map") {
        const auto a = VarianceProfile::identity(3);
        const ComplexDiagonal d(std::vector<cplx>{cplx(1, -2), cplx(0.5, 0), cplx(0, -1)});
        REQUIRE(eta(a, d) == d);
    }
    SECTION("dimension mismatch is rejected") {
        REQUIRE_THROWS_AS(eta(VarianceProfile::identity(2), ComplexDiagonal(3)),
                          ValidationError);
    }
}

TEST_CASE("iteration map is a resolvent step into the lower half-plane", "[solver]") {
    SECTION("scalar arithmetic") {
        const auto a = VarianceProfile::from_rows({{1.0}});
        const ComplexDiagonal d(std::vector<cplx>{cplx(0, -1)});
        const auto w = t_map(a, cplx(0, 2), d);
        REQUIRE(std::abs(w[0] - cplx(0, -1.0 / 3.0)) < 1e-15);
    }
    SECTION("zero profile returns 1/z") {
        const auto a = VarianceProfile::from_rows({{0.0}});
        const cplx z(0.7, 0.4);
        const auto w = t_map(a, z, ComplexDiagonal(std::vector<cplx>{cplx(5, -5)}));
        REQUIRE(std::abs(w[0] - 1.0 / z) < 1e-15);
    }
    SECTION("symmetric all-ones case") {
        const auto a = VarianceProfile::constant(2, 1.0);
        const ComplexDiagonal d(std::vector<cplx>{cplx(0, -1), cplx(0, -1)});
        const auto w = t_map(a, cplx(0, 1), d);
        for (int i = 0; i < 2; ++i) REQUIRE(std::abs(w[i] - cplx(0, -1.0 / 3.0)) < 1e-15);
    }
    SECTION("norm bound and half-plane membership hold on random input") {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int rep = 0; rep < 30; ++rep) {
            const int d = 1 + static_cast<int>(gen() % 4);
            const auto a = random_profile(gen, d);
            ComplexDiagonal diag(d);
            for (int i = 0; i < d; ++i) diag[i] = cplx(2.0 * u(gen) - 1.0, -u(gen));
            const cplx z(2.0 * u(gen) - 1.0, 0.1 + u(gen));
            const auto w = t_map(a, z, diag);
            REQUIRE(in_open_lower_half_plane(w));
            REQUIRE(l1_norm(w) <= d / z.imag() * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("closed form for constant row sums", "[solver]") {
    SECTION("K=1 at z=2i equals i(1-sqrt(2))") {
        const cplx g = closed_form_constant_rowsum(1.0, cplx(0, 2));
        REQUIRE(std::abs(g - cplx(0.0, 1.0 - std::sqrt(2.0))) < 1e-14);
        REQUIRE(g.imag() < 0.0);
    }
    SECTION("Cauchy-transform normalization at large imaginary argument") {
        double prev = 1.0;
        for (const double y : {1e2, 1e4, 1e6}) {
            const cplx val = cplx(0, y) * closed_form_constant_rowsum(1.0, cplx(0, y));
            const double err = std::abs(val - 1.0);
            REQUIRE(err < prev);
            prev = err;
        }
        REQUIRE(prev < 1e-10);
    }
    SECTION("K=3 near the real axis matches the real-axis limit") {
        const cplx g = closed_form_constant_rowsum(3.0, cplx(0.5, 0.001));
        const double limit = -std::sqrt(4.0 * 3.0 - 0.25) / (2.0 * 3.0);
        REQUIRE(g.imag() == Catch::Approx(limit).margin(1e-3));
    }
    SECTION("branch is in the lower half-plane across the plane") {
        for (const double x : {-5.0, -2.0, -0.5, 0.0, 0.5, 2.0, 5.0})
            for (const double y : {1e-6, 1e-3, 0.1, 1.0, 10.0})
                for (const double K : {0.25, 1.0, 3.0, 10.0})
                    REQUIRE(closed_form_constant_rowsum(K, cplx(x, y)).imag() < 0.0);
    }
}

TEST_CASE("fixed point at a single spectral point", "[solver]") {
    SECTION("scalar standard semicircle at z=2i") {
        const auto a = VarianceProfile::from_rows({{1.0}});
        SolverSettings settings;
        settings.tol = 1e-14;
        settings.max_iter = 100000;
        const auto r = solve_point(a, cplx(0, 2), settings);
        REQUIRE(r.converged);
        REQUIRE(std::abs(r.g[0] - cplx(0.0, 1.0 - std::sqrt(2.0))) < 1e-12);
    }
    SECTION("zero profile solves exactly in one application") {
        const auto a = VarianceProfile::from_rows({{0.0}});
        const cplx z(1.0, 1.0);
        SolverSettings settings;
        const auto r = solve_point(a, z, settings);
        REQUIRE(r.converged);
        REQUIRE(r.g[0] == 1.0 / z);
        REQUIRE(r.iterations <= 2);
        REQUIRE(r.residual < 1e-15);
    }
    SECTION("constant row-sum profile matches the closed form") {
        const auto a = VarianceProfile::constant(3, 1.0);  // K = 3
        SolverSettings settings;
        settings.tol = 1e-10;
        settings.max_iter = 400000;  // bulk contraction is only 1 - O(epsilon)
        const cplx z(0.5, 0.001);
        const auto r = solve_point(a, z, settings);
        REQUIRE(r.converged);
        const cplx expected = closed_form_constant_rowsum(3.0, z);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(std::abs(r.g[i] - expected) < 10.0 * settings.tol);
            REQUIRE(std::abs(r.g[i] - r.g[0]) < 1e-12);
        }
    }
    SECTION("non-convergence is flagged, not thrown") {
        const auto a = VarianceProfile::constant(3, 1.0);
        SolverSettings settings;
        settings.tol = 1e-300;
        settings.max_iter = 5;
        const auto r = solve_point(a, cplx(0.0, 0.001), settings);
        REQUIRE_FALSE(r.converged);
        REQUIRE(r.iterations == 5);
    }
}

TEST_CASE("initial values must be in the closed lower half-plane", "[solver]") {
    const auto a = VarianceProfile::identity(2);
    ComplexDiagonal bad(2);
    bad[0] = cplx(0.0, 0.5);
    REQUIRE_THROWS_AS(solve_point(a, cplx(0, 1), bad, SolverSettings{}), ValidationError);
    // Im == 0 entries are allowed
    REQUIRE_NOTHROW(solve_point(a, cplx(0, 1), ComplexDiagonal(2), SolverSettings{}));
}

TEST_CASE("grid sweep matches the semicircle density", "[solver]") {
    const auto a = VarianceProfile::from_rows({{1.0}});
    SolverSettings settings;
    settings.tol = 1e-8;
    settings.epsilon = 1e-3;
    settings.max_iter = 200000;
    const auto xs = make_grid(-3.0, 3.0, 0.1);
    const auto results = solve_grid(a, xs, settings);
    REQUIRE(results.size() == xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        REQUIRE(results[k].converged);
        if (std::abs(xs[k]) <= 1.9) {
            const double density = -results[k].g[0].imag() / kPi;
            REQUIRE(density == Catch::Approx(semicircle_density(1.0, xs[k])).margin(0.01));
        }
    }
}

TEST_CASE("grid of length one reduces to a cold solve", "[solver]") {
    const auto a = VarianceProfile::constant(2, 0.7);
    SolverSettings settings;
    settings.tol = 1e-9;
    settings.epsilon = 0.05;
    const std::vector<double> xs = {0.3};
    const auto grid = solve_grid(a, xs, settings);
    const auto point = solve_point(a, cplx(0.3, 0.05), settings);
    REQUIRE(grid.size() == 1);
    REQUIRE(grid[0].g == point.g);
    REQUIRE(grid[0].iterations == point.iterations);
}

TEST_CASE("warm start agrees with cold start", "[solver]") {
    std::mt19937_64 gen(17);
    const auto a = random_profile(gen, 3, 0.2, 1.2);
    SolverSettings settings;
    settings.tol = 1e-10;
    settings.epsilon = 0.05;
    settings.max_iter = 100000;
    const auto xs = make_grid(-4.0, 4.0, 0.05);
    const auto warm = solve_grid(a, xs, settings);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto cold = solve_point(a, cplx(xs[k], settings.epsilon), settings);
        REQUIRE(warm[k].converged);
        REQUIRE(cold.converged);
        REQUIRE(l1_distance(warm[k].g, cold.g) < 10.0 * settings.tol);
    }
}

TEST_CASE("iterates satisfy the transform invariants", "[solver]") {
    std::mt19937_64 gen(23);
    SolverSettings settings;
    settings.tol = 1e-9;
    settings.epsilon = 1e-3;
    settings.max_iter = 400000;
    const auto xs = make_grid(-5.0, 5.0, 0.25);
    for (int rep = 0; rep < 5; ++rep) {
        const int d = 1 + static_cast<int>(gen() % 3);
        const auto a = random_profile(gen, d);
        for (const auto& r : solve_grid(a, xs, settings)) {
            REQUIRE(r.converged);
            REQUIRE(in_open_lower_half_plane(r.g));
            REQUIRE(l1_norm(r.g) <= d / settings.epsilon * (1.0 + 1e-9));
            REQUIRE(r.residual <= 10.0 * settings.tol);
        }
    }
}

TEST_CASE("resolvent normalization improves up the imaginary axis", "[solver]") {
    const auto a = VarianceProfile::from_rows({{1.0, 0.5}, {0.5, 1.5}});
    SolverSettings settings;
    settings.tol = 1e-12;
    double prev = 1.0;
    for (const double y : {1.0, 2.0, 4.0, 8.0}) {
        const auto r = solve_point(a, cplx(0, y), settings);
        REQUIRE(r.converged);
        const double err = std::abs(cplx(0, y) * normalized_trace(r.g) - 1.0);
        REQUIRE(err < prev);
        prev = err;
    }
}

TEST_CASE("solving a permuted profile permutes the solution", "[solver]") {
    std::mt19937_64 gen(29);
    const int d = 3;
    const auto a = random_profile(gen, d, 0.1, 1.5);
    const int perm[3] = {2, 0, 1};  // sigma(i)
    std::vector<double> permuted(9, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            permuted[static_cast<std::size_t>(perm[i]) * d + perm[j]] = a(i, j);
    const VarianceProfile pap(d, permuted);

    SolverSettings settings;
    settings.tol = 1e-12;
    const cplx z(0.4, 0.05);
    const auto base = solve_point(a, z, settings);
    const auto mapped = solve_point(pap, z, settings);
    REQUIRE(base.converged);
    REQUIRE(mapped.converged);
    for (int i = 0; i < d; ++i)
        REQUIRE(std::abs(mapped.g[perm[i]] - base.g[i]) < 1e-10);
}

TEST_CASE("symmetric permutation profiles reproduce the standard semicircle", "[solver]") {
    // A unitary selfadjoint 0/1 profile: rows have a single unit entry, K = 1.
    const auto swap01 = VarianceProfile::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}});
    SolverSettings settings;
    settings.tol = 1e-12;
    settings.epsilon = 1e-3;
    settings.max_iter = 400000;
    const auto xs = make_grid(-2.5, 2.5, 0.05);
    const auto results = solve_grid(swap01, xs, settings);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const cplx expected = closed_form_constant_rowsum(1.0, cplx(xs[k], settings.epsilon));
        const double density = -normalized_trace(results[k].g).imag() / kPi;
        REQUIRE(std::abs(density - (-expected.imag() / kPi)) < 1e-8);
    }
}
