#include "rdpredict/errors.hpp"
#include "rdpredict/sim.hpp"
#include "rdpredict/spectral.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace rdpredict;
using Catch::Matchers::WithinAbs;

namespace {

SturmLiouvilleProblem robin_problem() {
    SturmLiouvilleProblem pb;
    pb.rho = 1.0;
    pb.p = 0.015;
    pb.q = 0.35;
    pb.theta1 = std::numbers::pi / 3.0;
    pb.theta2 = std::numbers::pi / 10.0;
    return pb;
}

SturmLiouvilleProblem dirichlet_problem() {
    SturmLiouvilleProblem pb;
    pb.rho = 1.0;
    pb.p = 1.0;
    pb.q = 0.0;
    return pb;
}

std::vector<double> sampled(const Grid& g, double (*f)(double)) {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.nodes[i]);
    return out;
}

double example_y0(double xi) { return InitialCondition::paper_example()(xi); }

}  // namespace

TEST_CASE("simpson grid integrates constants and cubics exactly") {
    const Grid g = make_simpson_grid(201);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 1.0);
    std::vector<double> one(g.size(), 1.0);
    CHECK_THAT(g.integrate(one), WithinAbs(1.0, 1e-12));
    auto cubic = [](double x) { return 4.0 * x * x * x - x + 2.0; };
    std::vector<double> c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) c[i] = cubic(g.nodes[i]);
    CHECK_THAT(g.integrate(c), WithinAbs(2.5, 1e-13));
    CHECK_THROWS_AS(make_simpson_grid(200), InvalidArgument);
    CHECK_THROWS_AS(make_simpson_grid(1), InvalidArgument);
    CHECK_THROWS_AS(g.integrate(std::vector<double>(3)), DimensionError);
}

TEST_CASE("robin example spectrum") {
    const SpectralBasis b = solve_eigensystem(robin_problem(), 3, make_simpson_grid(201));
    REQUIRE(b.size() == 3);
    CHECK_THAT(b.eigenvalues[0], WithinAbs(0.317, 0.005));
    CHECK_THAT(b.eigenvalues[1], WithinAbs(0.116, 0.005));
    CHECK_THAT(b.eigenvalues[2], WithinAbs(-0.342, 0.005));
}

TEST_CASE("dirichlet laplacian spectrum") {
    const SpectralBasis b = solve_eigensystem(dirichlet_problem(), 8, make_simpson_grid(401));
    for (std::size_t n = 1; n <= 8; ++n) {
        const double exact = -std::pow(n * std::numbers::pi, 2);
        CHECK_THAT(b.eigenvalues[n - 1], WithinAbs(exact, 1e-8 * std::abs(exact)));
    }
    // Dirichlet: the first sample is zero, so the sign is fixed by the second.
    for (const auto& e : b.eigenfunctions) {
        CHECK(std::abs(e.front()) < 1e-12);
        CHECK(e[1] > 0.0);
    }
}

TEST_CASE("constant shift of q shifts every eigenvalue") {
    const Grid g = make_simpson_grid(201);
    SturmLiouvilleProblem pb = robin_problem();
    const SpectralBasis a = solve_eigensystem(pb, 6, g);
    pb.q = 0.35 + 1.25;
    const SpectralBasis b = solve_eigensystem(pb, 6, g);
    for (std::size_t n = 0; n < 6; ++n) {
        CHECK_THAT(b.eigenvalues[n] - a.eigenvalues[n], WithinAbs(1.25, 1e-9));
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK_THAT(b.eigenfunctions[n][i], WithinAbs(a.eigenfunctions[n][i], 1e-8));
        }
    }
}

TEST_CASE("first twenty modes are orthonormal with oscillation indices 0..19") {
    const SpectralBasis b = solve_eigensystem(robin_problem(), 20, make_simpson_grid(201));
    for (std::size_t m = 0; m < 20; ++m) {
        for (std::size_t n = 0; n < 20; ++n) {
            const double g = b.inner(b.eigenfunctions[m], b.eigenfunctions[n]);
            CHECK_THAT(g, WithinAbs(m == n ? 1.0 : 0.0, 1e-8));
        }
        CHECK(count_sign_changes(b.eigenfunctions[m]) == m);
        if (m > 0) CHECK(b.eigenvalues[m] < b.eigenvalues[m - 1]);
    }
}

TEST_CASE("weak-form residual including the boundary terms") {
    // int p e_m' e_n' - int q e_m e_n + p(1) cot(theta2) e_m(1) e_n(1)
    //   + p(0) cot(theta1) e_m(0) e_n(0) = -lambda_n delta_mn
    const SturmLiouvilleProblem pb = robin_problem();
    const SpectralBasis b = solve_eigensystem(pb, 10, make_simpson_grid(401));
    const Grid& g = b.grid;
    const double cot1 = 1.0 / std::tan(pb.theta1);
    const double cot2 = 1.0 / std::tan(pb.theta2);
    const std::size_t last = g.size() - 1;
    for (std::size_t m = 0; m < 10; ++m) {
        for (std::size_t n = 0; n < 10; ++n) {
            std::vector<double> integrand(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double xi = g.nodes[i];
                integrand[i] = pb.p(xi) * b.derivatives[m][i] * b.derivatives[n][i] -
                               pb.q(xi) * b.eigenfunctions[m][i] * b.eigenfunctions[n][i];
            }
            const double form = g.integrate(integrand) +
                                pb.p(1.0) * cot2 * b.eigenfunctions[m][last] * b.eigenfunctions[n][last] +
                                pb.p(0.0) * cot1 * b.eigenfunctions[m][0] * b.eigenfunctions[n][0];
            const double expected = m == n ? -b.eigenvalues[n] : 0.0;
            CHECK_THAT(form, WithinAbs(expected, 1e-6 * std::max(1.0, std::abs(b.eigenvalues[n]))));
        }
    }
}

TEST_CASE("variable coefficients keep the basis orthonormal") {
    SturmLiouvilleProblem pb;
    pb.rho = Coefficient::polynomial({1.0, 0.5});
    pb.p = Coefficient::polynomial({0.02, 0.01, 0.01});
    pb.q = Coefficient::polynomial({0.3, -0.2});
    pb.theta1 = 0.4;
    pb.theta2 = 1.1;
    const SpectralBasis b = solve_eigensystem(pb, 12, make_simpson_grid(201));
    for (std::size_t m = 0; m < 12; ++m) {
        CHECK(count_sign_changes(b.eigenfunctions[m]) == m);
        for (std::size_t n = 0; n <= m; ++n) {
            CHECK_THAT(b.inner(b.eigenfunctions[m], b.eigenfunctions[n]), WithinAbs(m == n ? 1.0 : 0.0, 1e-8));
        }
    }
}

TEST_CASE("projection of an eigenfunction and of zero") {
    const SpectralBasis b = solve_eigensystem(robin_problem(), 5, make_simpson_grid(201));
    const auto c = project(b.eigenfunctions[0], b, 5);
    CHECK_THAT(c[0], WithinAbs(1.0, 1e-8));
    for (std::size_t k = 1; k < 5; ++k) CHECK_THAT(c[k], WithinAbs(0.0, 1e-8));
    const auto z = project(std::vector<double>(b.grid.size(), 0.0), b, 5);
    for (double v : z) CHECK(v == 0.0);
    CHECK_THROWS_AS(project(std::vector<double>(10, 1.0), b, 5), DimensionError);
    CHECK_THROWS_AS(project(b.eigenfunctions[0], b, 6), DimensionError);
}

TEST_CASE("projection of the example initial profile matches a 10x finer quadrature") {
    const SturmLiouvilleProblem pb = robin_problem();
    const SpectralBasis coarse = solve_eigensystem(pb, 20, make_simpson_grid(201));
    const SpectralBasis medium = solve_eigensystem(pb, 20, make_simpson_grid(401));
    const SpectralBasis fine = solve_eigensystem(pb, 20, make_simpson_grid(4001));
    const auto c = project(sampled(coarse.grid, example_y0), coarse, 20);
    const auto m = project(sampled(medium.grid, example_y0), medium, 20);
    const auto f = project(sampled(fine.grid, example_y0), fine, 20);
    for (std::size_t k = 0; k < 20; ++k) {
        CHECK_THAT(m[k], WithinAbs(f[k], 1e-6));
        // Simpson: halving h cuts the error by 16 once the error is above round-off.
        if (std::abs(c[k] - f[k]) > 1e-9) CHECK(std::abs(c[k] - f[k]) / std::abs(m[k] - f[k]) > 12.0);
    }
}

TEST_CASE("synthesis round trip and truncation tail") {
    const SpectralBasis b = solve_eigensystem(robin_problem(), 40, make_simpson_grid(201));
    std::vector<double> unit(3, 0.0);
    unit[0] = 1.0;
    const auto e1 = synthesize(unit, b);
    for (std::size_t i = 0; i < e1.size(); ++i) CHECK(e1[i] == b.eigenfunctions[0][i]);

    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    std::vector<double> coeffs(20);
    for (double& v : coeffs) v = nd(rng);
    const auto back = project(synthesize(coeffs, b), b, 20);
    for (std::size_t k = 0; k < 20; ++k) CHECK_THAT(back[k], WithinAbs(coeffs[k], 1e-8));

    const auto y0 = sampled(b.grid, example_y0);
    const auto c40 = project(y0, b, 40);
    std::vector<double> c20(c40.begin(), c40.begin() + 20);
    const auto approx = synthesize(c20, b);
    std::vector<double> diff(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i) diff[i] = y0[i] - approx[i];
    double tail = 0.0;
    for (std::size_t k = 20; k < 40; ++k) tail += c40[k] * c40[k];
    const double residual = b.norm(diff);
    CHECK(residual >= std::sqrt(tail) * (1.0 - 1e-6));
    CHECK(residual <= 1.25 * std::sqrt(tail));
}

TEST_CASE("parseval inequality for random samples") {
    const SpectralBasis b = solve_eigensystem(robin_problem(), 20, make_simpson_grid(201));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> f(b.grid.size());
        for (double& v : f) v = u(rng);
        const double energy = b.inner(f, f);
        const auto c = project(f, b, 20);
        double partial = 0.0;
        for (double v : c) {
            partial += v * v;
            CHECK(energy - partial >= -1e-8);
        }
    }
}

TEST_CASE("invalid problems are rejected") {
    const Grid g = make_simpson_grid(201);
    SturmLiouvilleProblem pb = robin_problem();
    pb.p = Coefficient::polynomial({0.01, -0.02});
    CHECK_THROWS_AS(solve_eigensystem(pb, 3, g), InvalidArgument);
    pb = robin_problem();
    pb.rho = 0.0;
    CHECK_THROWS_AS(solve_eigensystem(pb, 3, g), InvalidArgument);
    CHECK_THROWS_AS(solve_eigensystem(robin_problem(), 0, g), InvalidArgument);
    CHECK_THROWS_AS(solve_eigensystem(robin_problem(), 3, g, 0.0), InvalidArgument);
}

TEST_CASE("eigensolver is deterministic") {
    const Grid g = make_simpson_grid(201);
    const SpectralBasis a = solve_eigensystem(robin_problem(), 10, g);
    const SpectralBasis b = solve_eigensystem(robin_problem(), 10, g);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenfunctions == b.eigenfunctions);
}

TEST_CASE("sign change counting ignores the noise floor") {
    CHECK(count_sign_changes(std::vector<double>{1.0, 2.0, 3.0}) == 0);
    CHECK(count_sign_changes(std::vector<double>{1.0, -1.0, 1.0}) == 2);
    CHECK(count_sign_changes(std::vector<double>{0.0, 1.0, 1e-14, -1e-14, 1.0}) == 0);
    CHECK(count_sign_changes(std::vector<double>{1.0, 0.0, -1.0}) == 1);
}

TEST_CASE("characteristic function vanishes at computed eigenvalues") {
    const Grid g = make_simpson_grid(201);
    const SturmLiouvilleProblem pb = robin_problem();
    const SpectralBasis b = solve_eigensystem(pb, 4, g);
    for (double lam : b.eigenvalues) {
        const double lo = characteristic_function(pb, lam - 1e-6, g);
        const double hi = characteristic_function(pb, lam + 1e-6, g);
        CHECK(lo * hi < 0.0);
    }
}
