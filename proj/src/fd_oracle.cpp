#include "rdpredict/fd_oracle.hpp"

#include "rdpredict/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rdpredict {

double FdResult::norm(const std::vector<double>& y) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += grid.weights[i] * rho[i] * y[i] * y[i];
    return std::sqrt(acc);
}

namespace {

struct Tridiagonal {
    std::vector<double> lower, diag, upper;
    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
};

// Solves (I - c L) y = rhs in place; Dirichlet rows are pinned to zero.
void solve_shifted(const Tridiagonal& L, double c, const std::vector<bool>& pinned, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    std::vector<double> cp(n), dp(n);
    auto coeffs = [&](std::size_t i, double& a, double& b, double& up) {
        if (pinned[i]) {
            a = 0.0;
            b = 1.0;
            up = 0.0;
            return;
        }
        a = -c * L.lower[i];
        b = 1.0 - c * L.diag[i];
        up = -c * L.upper[i];
    };
    double a, b, up;
    coeffs(0, a, b, up);
    double r0 = pinned[0] ? 0.0 : rhs[0];
    cp[0] = up / b;
    dp[0] = r0 / b;
    for (std::size_t i = 1; i < n; ++i) {
        coeffs(i, a, b, up);
        const double ri = pinned[i] ? 0.0 : rhs[i];
        const double m = b - a * cp[i - 1];
        cp[i] = up / m;
        dp[i] = (ri - a * dp[i - 1]) / m;
    }
    rhs[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = dp[i] - cp[i] * rhs[i + 1];
}

void apply(const Tridiagonal& L, const std::vector<double>& y, std::vector<double>& out) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = L.diag[i] * y[i];
        if (i > 0) acc += L.lower[i] * y[i - 1];
        if (i + 1 < n) acc += L.upper[i] * y[i + 1];
        out[i] = acc;
    }
}

}  // namespace

FdResult fd_oracle(const SimulationConfig& config, const SimulationRun& run, const FdOptions& options) {
    const std::size_t n = options.nodes;
    if (n < 5) throw InvalidArgument("fd_oracle: resolution too coarse (need >= 5 nodes)");
    const Grid grid = make_simpson_grid(n);
    const SturmLiouvilleProblem& pb = config.problem;
    pb.validate(grid);
    const std::size_t N = config.design.N;
    const double dt = options.dt > 0.0 ? options.dt : config.dt;
    if (run.times.empty()) throw InvalidArgument("fd_oracle: empty simulation run");
    const double t_end = run.times.back();

    std::size_t n_modes = N;
    if (config.y0.kind == InitialKind::eigenfunction) n_modes = std::max(n_modes, config.y0.index);
    const SpectralBasis basis = solve_eigensystem(pb, std::max<std::size_t>(n_modes, 1), grid, config.eig_tol);

    ControlHistory history(N, config.dt, t_end + 10.0 * config.dt);
    for (const auto& w : run.w) history.push(w);

    const double h = grid.spacing();
    Tridiagonal L(n);
    std::vector<bool> pinned(n, false);
    const bool dirichlet_left = std::abs(std::sin(pb.theta1)) < 1e-14;
    const bool dirichlet_right = std::abs(std::sin(pb.theta2)) < 1e-14;
    pinned.front() = dirichlet_left;
    pinned.back() = dirichlet_right;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = grid.nodes[i];
        const double pm = pb.p(xi - 0.5 * h);
        const double pp = pb.p(xi + 0.5 * h);
        const double inv = 1.0 / (pb.rho(xi) * h * h);
        if (i == 0) {
            if (dirichlet_left) continue;
            const double cot1 = std::cos(pb.theta1) / std::sin(pb.theta1);
            L.upper[i] = (pp + pm) * inv;
            L.diag[i] = -(pp + pm + 2.0 * h * cot1 * pm) * inv;
        } else if (i == n - 1) {
            if (dirichlet_right) continue;
            const double cot2 = std::cos(pb.theta2) / std::sin(pb.theta2);
            L.lower[i] = (pp + pm) * inv;
            L.diag[i] = -(pp + pm + 2.0 * h * cot2 * pp) * inv;
        } else {
            L.lower[i] = pm * inv;
            L.upper[i] = pp * inv;
            L.diag[i] = -(pm + pp) * inv;
        }
        L.diag[i] += pb.q(xi) / pb.rho(xi);
    }

    std::vector<double> w(N);
    auto forcing = [&](double t, std::vector<double>& f) {
        std::fill(f.begin(), f.end(), 0.0);
        if (options.zero_input) return;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i]) continue;
            const double xi = grid.nodes[i];
            history.lookup(t - config.delay(t, xi), w);
            double acc = 0.0;
            for (std::size_t k = 0; k < N; ++k) acc += w[k] * basis.eigenfunctions[k][i];
            f[i] = acc;
        }
    };

    std::vector<double> y(n);
    if (config.y0.kind == InitialKind::sampled) {
        throw InvalidArgument("fd_oracle: sampled initial conditions are tied to the modal grid");
    }
    if (config.y0.kind == InitialKind::eigenfunction) {
        y = basis.eigenfunctions[config.y0.index - 1];
    } else {
        for (std::size_t i = 0; i < n; ++i) y[i] = config.y0(grid.nodes[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (pinned[i]) y[i] = 0.0;

    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    std::set<std::size_t> wanted;
    if (options.output_times.empty()) {
        wanted.insert(n_steps);
    } else {
        for (double t : options.output_times) {
            if (t < 0.0 || t > t_end + 1e-12) throw InvalidArgument("fd_oracle: output time outside the run");
            wanted.insert(static_cast<std::size_t>(std::llround(t / dt)));
        }
    }

    FdResult out;
    out.grid = grid;
    out.rho = basis.rho;
    auto record = [&](std::size_t step) {
        if (wanted.count(step)) {
            out.times.push_back(static_cast<double>(step) * dt);
            out.states.push_back(y);
        }
    };
    record(0);

    std::vector<double> f0(n), f1(n), ly(n), rhs(n);
    forcing(0.0, f0);
    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        if (s < 2) {
            // Two backward-Euler half steps damp the non-smooth initial data.
            for (int half = 1; half <= 2; ++half) {
                const double th = t + 0.5 * dt * half;
                forcing(th, f1);
                for (std::size_t i = 0; i < n; ++i) rhs[i] = y[i] + 0.5 * dt * f1[i];
                solve_shifted(L, 0.5 * dt, pinned, rhs);
                y.swap(rhs);
            }
            forcing(t + dt, f0);
        } else {
            forcing(t + dt, f1);
            apply(L, y, ly);
            for (std::size_t i = 0; i < n; ++i) rhs[i] = y[i] + 0.5 * dt * (ly[i] + f0[i] + f1[i]);
            solve_shifted(L, 0.5 * dt, pinned, rhs);
            y.swap(rhs);
            f0.swap(f1);
        }
        for (double v : y) {
            if (!std::isfinite(v)) throw DivergenceError("fd_oracle: state diverged", t + dt);
        }
        record(s + 1);
    }
    return out;
}

double relative_l2_discrepancy(const SpectralBasis& basis, const std::vector<double>& modal_coeffs,
                               const std::vector<double>& oracle_state) {
    if (oracle_state.size() != basis.grid.size()) {
        throw DimensionError("relative_l2_discrepancy: oracle grid differs from the basis grid");
    }
    const std::vector<double> modal = synthesize(modal_coeffs, basis);
    std::vector<double> diff(modal.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = modal[i] - oracle_state[i];
    return basis.norm(diff) / basis.norm(modal);
}

FdConvergenceReport fd_convergence_report(const SimulationConfig& config, double t_compare,
                                          std::size_t nodes) {
    auto discrepancy = [&](std::size_t n_nodes) {
        SimulationConfig c = config;
        c.grid_nodes = n_nodes;
        c.t_end = t_compare;
        const SpectralBasis basis =
            solve_eigensystem(c.problem, c.n_sim_modes, make_simpson_grid(n_nodes), c.eig_tol);
        const SimulationRun modal = run(c, basis);
        if (modal.diverged) throw DivergenceError("fd_convergence_report: modal run diverged", modal.divergence_time);
        FdOptions opt;
        opt.nodes = n_nodes;
        const FdResult fd = fd_oracle(c, modal, opt);
        return relative_l2_discrepancy(basis, modal.x.back(), fd.states.back());
    };
    FdConvergenceReport r;
    r.coarse_nodes = nodes;
    r.fine_nodes = 2 * nodes - 1;
    r.coarse_discrepancy = discrepancy(r.coarse_nodes);
    r.fine_discrepancy = discrepancy(r.fine_nodes);
    r.ratio = r.coarse_discrepancy / r.fine_discrepancy;
    r.converged = r.ratio >= 2.0;
    return r;
}

}  // namespace rdpredict
