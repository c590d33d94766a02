#include "rdpredict/control.hpp"
#include "rdpredict/errors.hpp"
#include "rdpredict/spectral.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace rdpredict;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ControllerDesign scalar_design(double lambda, double k, double D0 = 1.0, double t0 = 0.2) {
    ControllerDesign d;
    d.N = 1;
    d.lambdas = {lambda};
    d.D0 = D0;
    d.t0 = t0;
    d.K = Matrix::Constant(1, 1, k);
    d.Acl = Matrix::Constant(1, 1, lambda + std::exp(-D0 * lambda) * k);
    d.poles = {d.Acl(0, 0)};
    return d;
}

ControllerDesign example_design() {
    const std::vector<double> eig{0.317, 0.116, -0.342};
    const std::vector<double> poles{-0.3, -0.3};
    return make_design(eig, 0.0, 1.0, poles, 0.2);
}

// History holding the constant c at every sample up to and including t.
ControlHistory constant_history(double c, double h, double t) {
    ControlHistory hist(1, h, t + 1.0);
    const auto n = static_cast<int>(std::lround(t / h));
    for (int k = 0; k <= n; ++k) hist.push(std::span<const double>(&c, 1));
    return hist;
}

double integral_error(QuadratureRule rule, double h) {
    const double lambda = 0.317, c = 1.7, t = 3.0;
    const Predictor pred(scalar_design(lambda, -1.0), h, rule);
    const ControlHistory hist = constant_history(c, h, t);
    const double exact = c * (1.0 - std::exp(-lambda)) / lambda;
    return std::abs(pred.integral(t, hist)[0] - exact);
}

}  // namespace

TEST_CASE("transition signal") {
    const TransitionSignal phi{0.2};
    CHECK(transition(phi, -1.0) == 0.0);
    CHECK(transition(phi, 0.0) == 0.0);
    CHECK_THAT(transition(phi, 0.1), WithinAbs(0.5, 1e-15));
    CHECK(transition(phi, 0.2) == 1.0);
    CHECK(transition(phi, 5.0) == 1.0);
    for (int i = 0; i <= 100; ++i) {
        const double v = phi(-0.5 + 0.01 * i);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("constant-history integral converges at first and second order") {
    const double hs[3] = {1e-2, 5e-3, 2.5e-3};
    double left[3], trap[3];
    for (int i = 0; i < 3; ++i) {
        left[i] = integral_error(QuadratureRule::left_riemann, hs[i]);
        trap[i] = integral_error(QuadratureRule::trapezoid, hs[i]);
    }
    for (int i = 0; i < 2; ++i) {
        CHECK_THAT(left[i] / left[i + 1], WithinAbs(2.0, 0.1));
        CHECK_THAT(trap[i] / trap[i + 1], WithinAbs(4.0, 0.2));
    }
    CHECK(trap[0] < left[0]);
}

TEST_CASE("scalar predictor output against the closed form") {
    const double lambda = 0.317, k = -0.847, c = 0.4, x = 0.25, t = 3.0;
    double prev = 0.0;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const Predictor pred(scalar_design(lambda, k), h);
        const ControlHistory hist = constant_history(c, h, t - h);
        const double expected = k * (x + c * (1.0 - std::exp(-lambda)) / lambda);
        const double err = std::abs(pred.output(t, std::vector<double>{x}, hist)[0] - expected);
        CHECK(err < 0.01);
        if (prev > 0.0) CHECK_THAT(prev / err, WithinAbs(2.0, 0.1));
        prev = err;
    }
}

TEST_CASE("left rule needs only past samples") {
    const ControllerDesign d = example_design();
    const double h = 0.01;
    const Predictor pred(d, h);
    ControlHistory hist(2, h, 2.0);
    for (int k = 0; k < 150; ++k) hist.push(std::vector<double>{0.01 * k, -0.02 * k});
    const std::vector<double> x{0.3, -0.1};
    const double t = 1.5;  // newest stored sample is at t - h
    const auto w1 = pred.output(t, x, hist);
    hist.push(std::vector<double>{99.0, 99.0});
    const auto w2 = pred.output(t, x, hist);
    CHECK(w1 == w2);
}

TEST_CASE("trapezoid output solves its implicit equation") {
    const ControllerDesign d = example_design();
    const double h = 0.01, t = 2.0;
    const Predictor pred(d, h, QuadratureRule::trapezoid);
    ControlHistory hist(2, h, 3.0);
    for (int k = 0; k < 200; ++k) hist.push(std::vector<double>{std::sin(0.01 * k), std::cos(0.03 * k)});
    const std::vector<double> x{0.3, -0.1};
    std::vector<double> z;
    const auto w = pred.output(t, x, hist, &z);
    hist.push(w);
    const auto z_check = pred.artstein_state(t, x, hist);
    for (std::size_t k = 0; k < 2; ++k) {
        double rhs = 0.0;
        for (std::size_t j = 0; j < 2; ++j) rhs += d.K(k, j) * z_check[j];
        CHECK_THAT(w[k], WithinAbs(rhs, 1e-12));
        CHECK_THAT(z[k], WithinAbs(z_check[k], 1e-12));
    }
}

TEST_CASE("degenerate trapezoid system reports the step size") {
    const double h = 0.01;
    const Predictor pred(scalar_design(0.0, 2.0 / h), h, QuadratureRule::trapezoid);
    const ControlHistory hist = constant_history(0.0, h, 0.99);
    CHECK_THROWS_AS(pred.output(1.0, std::vector<double>{1.0}, hist), StepSizeError);
}

TEST_CASE("zero gain, zero history and the transition window") {
    const double h = 0.01;
    const Predictor zero(scalar_design(-0.5, 0.0), h);
    ControlHistory hist(1, h, 2.0);
    for (int k = 0; k < 50; ++k) {
        const double v = 1.0;
        hist.push(std::span<const double>(&v, 1));
    }
    CHECK(zero.output(0.5, std::vector<double>{3.0}, hist)[0] == 0.0);

    const ControllerDesign d = example_design();
    const Predictor pred(d, h);
    ControlHistory empty(2, h, 2.0);
    const std::vector<double> x{0.7, -0.2};
    CHECK(pred.output(0.0, x, empty) == std::vector<double>{0.0, 0.0});
    const auto z0 = pred.artstein_state(0.0, x, empty);
    CHECK(z0 == x);
    empty.push(std::vector<double>{0.0, 0.0});
    std::vector<double> z;
    pred.output(0.01, x, empty, &z);
    CHECK(z == x);
}

TEST_CASE("predictor argument checks") {
    const ControllerDesign d = example_design();
    CHECK_THROWS_AS(Predictor(d, 0.3), InvalidArgument);
    CHECK_THROWS_AS(Predictor(d, 0.0), InvalidArgument);
    const Predictor pred(d, 0.01);
    ControlHistory hist(2, 0.01, 2.0);
    hist.push(std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(pred.output(0.005, std::vector<double>{0.0, 0.0}, hist), InvalidArgument);
    CHECK_THROWS_AS(pred.output(0.01, std::vector<double>{0.0}, hist), DimensionError);
    CHECK(pred.nodes_per_delay() == 100);
    CHECK(quadrature_rule_from_string("left") == QuadratureRule::left_riemann);
    CHECK(quadrature_rule_from_string("trapezoid") == QuadratureRule::trapezoid);
    CHECK_THROWS_AS(quadrature_rule_from_string("midpoint"), InvalidArgument);
}

TEST_CASE("synthesized input norm equals the control norm") {
    SturmLiouvilleProblem pb;
    pb.p = 0.015;
    pb.q = 0.35;
    pb.theta1 = std::numbers::pi / 3.0;
    pb.theta2 = std::numbers::pi / 10.0;
    const SpectralBasis b = solve_eigensystem(pb, 4, make_simpson_grid(201));
    for (const auto& w : {std::vector<double>{0.3, -1.2}, std::vector<double>{2.0, 0.5, -0.1, 0.7}}) {
        const auto u = synthesize(w, b);
        double norm = 0.0;
        for (double v : w) norm += v * v;
        CHECK_THAT(b.norm(u), WithinRel(std::sqrt(norm), 1e-8));
    }
}
