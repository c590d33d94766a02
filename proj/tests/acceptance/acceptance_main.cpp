// Acceptance checks for the reference example. One line per criterion; the
// exit status is non-zero if any criterion fails.

#include "rdpredict/control.hpp"
#include "rdpredict/design.hpp"
#include "rdpredict/errors.hpp"
#include "rdpredict/fd_oracle.hpp"
#include "rdpredict/linalg.hpp"
#include "rdpredict/sim.hpp"
#include "rdpredict/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace rdpredict;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

SturmLiouvilleProblem example_problem() {
    SturmLiouvilleProblem pb;
    pb.p = 0.015;
    pb.q = 0.35;
    pb.theta1 = std::numbers::pi / 3.0;
    pb.theta2 = std::numbers::pi / 10.0;
    return pb;
}

const std::vector<double> kPoles{-0.3, -0.3};

SimulationConfig example_config(const SpectralBasis& basis) {
    SimulationConfig c;
    c.problem = example_problem();
    c.design = make_design(basis.eigenvalues, 0.0, 1.0, kPoles, 0.2);
    return c;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

double integral_error(QuadratureRule rule, double h) {
    const double lambda = 0.317, c = 1.7, t = 3.0;
    ControllerDesign d;
    d.N = 1;
    d.lambdas = {lambda};
    d.D0 = 1.0;
    d.K = Matrix::Constant(1, 1, -1.0);
    d.Acl = Matrix::Constant(1, 1, lambda - std::exp(-lambda));
    d.poles = {d.Acl(0, 0)};
    const Predictor pred(d, h, rule);
    ControlHistory hist(1, h, t + 1.0);
    const auto n = static_cast<int>(std::lround(t / h));
    for (int k = 0; k <= n; ++k) hist.push(std::span<const double>(&c, 1));
    const double exact = c * (1.0 - std::exp(-lambda)) / lambda;
    return std::abs(pred.integral(t, hist)[0] - exact);
}

}  // namespace

int main() {
    const auto t_basis = Clock::now();
    const SpectralBasis basis = solve_eigensystem(example_problem(), 20, make_simpson_grid(201));
    const double basis_seconds = seconds_since(t_basis);

    report("spectrum", [&] {
        const double expected[3] = {0.317, 0.116, -0.342};
        bool ok = basis_seconds < 1.0;
        for (int i = 0; i < 3; ++i) ok = ok && std::abs(basis.eigenvalues[i] - expected[i]) <= 0.005;
        return Outcome{ok, fmt("lambda = %.6f, %.6f, %.6f; %.3f s", basis.eigenvalues[0], basis.eigenvalues[1],
                               basis.eigenvalues[2], basis_seconds)};
    });

    report("orthonormality", [&] {
        double worst = 0.0;
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j)
                worst = std::max(worst, std::abs(basis.inner(basis.eigenfunctions[i], basis.eigenfunctions[j]) -
                                                 (i == j ? 1.0 : 0.0)));
        bool indices = basis.size() == 20;
        for (std::size_t n = 0; n < basis.size(); ++n)
            indices = indices && count_sign_changes(basis.eigenfunctions[n]) == n;
        return Outcome{worst < 1e-8 && indices,
                       fmt("max |G - I| = %.3g; oscillation indices %s", worst, indices ? "0..19" : "wrong")};
    });

    const SimulationConfig config = example_config(basis);
    const ControllerDesign& design = config.design;

    report("gain identity", [&] {
        const double r = design.identity_residual();
        return Outcome{design.N == 2 && r < 1e-12, fmt("N = %zu, residual = %.3g", design.N, r)};
    });

    report("certificate", [&] {
        const MaxDeltaResult md = max_delta(design.Acl, design.K, design.N, design.D0, true);
        const double at_zero = small_gain_lhs(design.Acl, design.K, md.M, md.sigma, design.N, 0.0);
        return Outcome{at_zero == 0.0 && md.delta_max >= 0.23,
                       fmt("lhs(0) = %g; delta_max = %.6f (M = %.4f, sigma = %.4f); gap to 0.237 = %+.6f", at_zero,
                           md.delta_max, md.M, md.sigma, md.delta_max - 0.237)};
    });

    report("closed-loop decay", [&] {
        const auto start = Clock::now();
        const SimulationRun closed = run(config, basis);
        const double elapsed = seconds_since(start);
        SimulationConfig open = config;
        open.open_loop = true;
        const SimulationRun opened = run(open, basis);
        const double ratio = closed.normX.back() / closed.normX.front();
        const double w_max = max_of(closed.normU);
        const double growth = -opened.kappa_est;
        const bool ok = !closed.diverged && ratio < 1e-2 && closed.kappa_est > 0.0 && std::isfinite(w_max) &&
                        std::abs(growth - 0.317) <= 0.05 * 0.317 && elapsed < 30.0;
        return Outcome{ok, fmt("normX(30)/normX(0) = %.3g, kappa = %.4f, max|w| = %.4f, open-loop rate = %.4f, %.2f s",
                               ratio, closed.kappa_est, w_max, growth, elapsed)};
    });

    report("nominal exactness", [&] {
        SimulationConfig c = config;
        c.delay = DelayField::constant(1.0);
        c.t_end = 10.5;
        const SimulationRun r = run(c, basis);
        const double delta_max = max_of(r.delta_norm);
        const auto i0 = static_cast<std::size_t>(std::lround(design.t0 / c.dt));
        const Vector z0 = Eigen::Map<const Vector>(r.z[i0].data(), 2);
        double worst = 0.0;
        for (std::size_t i = i0; i < r.times.size() && r.times[i] <= design.t0 + 10.0 + 1e-9; ++i) {
            const Vector zi = Eigen::Map<const Vector>(r.z[i].data(), 2);
            worst = std::max(worst, (zi - expm(design.Acl, r.times[i] - r.times[i0]) * z0).norm());
        }
        return Outcome{delta_max < 1e-6 && worst < 10.0 * c.dt,
                       fmt("max |Delta| = %.3g, max z propagation error = %.3g", delta_max, worst)};
    });

    report("oracle equivalence", [&] {
        const FdConvergenceReport rep = fd_convergence_report(config, 5.0, 201);
        return Outcome{rep.coarse_discrepancy <= 0.01 && rep.converged,
                       fmt("relative L2 at t = 5: %.3g (%zu nodes), %.3g (%zu nodes), ratio %.3f",
                           rep.coarse_discrepancy, rep.coarse_nodes, rep.fine_discrepancy, rep.fine_nodes, rep.ratio)};
    });

    report("truncation sufficiency", [&] {
        const SpectralBasis wide = solve_eigensystem(example_problem(), 30, make_simpson_grid(201));
        SimulationConfig c20 = example_config(wide);
        SimulationConfig c30 = c20;
        c30.n_sim_modes = 30;
        const SimulationRun a = run(c20, wide);
        const SimulationRun b = run(c30, wide);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.normX.size(); ++i)
            worst = std::max(worst, std::abs(a.normX[i] - b.normX[i]) / b.normX[i]);
        return Outcome{worst < 1e-3, fmt("max relative change in normX = %.3g", worst)};
    });

    report("convergence orders", [&] {
        const double hs[3] = {1e-2, 5e-3, 2.5e-3};
        double left[3], trap[3];
        for (int i = 0; i < 3; ++i) {
            left[i] = integral_error(QuadratureRule::left_riemann, hs[i]);
            trap[i] = integral_error(QuadratureRule::trapezoid, hs[i]);
        }
        const double pl1 = std::log2(left[0] / left[1]), pl2 = std::log2(left[1] / left[2]);
        const double pt1 = std::log2(trap[0] / trap[1]), pt2 = std::log2(trap[1] / trap[2]);
        const bool ok = std::min(pl1, pl2) > 0.9 && std::max(pl1, pl2) < 1.1 && std::min(pt1, pt2) > 1.9 &&
                        std::max(pt1, pt2) < 2.1;
        return Outcome{ok, fmt("observed orders left %.3f, %.3f; trapezoid %.3f, %.3f", pl1, pl2, pt1, pt2)};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
