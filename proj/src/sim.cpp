#include "rdpredict/sim.hpp"

#include "rdpredict/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rdpredict {

std::string_view to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::paper_example: return "paper_example";
        case InitialKind::polynomial: return "polynomial";
        case InitialKind::eigenfunction: return "eigenfunction";
        case InitialKind::sine: return "sine";
        case InitialKind::sampled: return "sampled";
    }
    return "paper_example";
}

InitialKind initial_kind_from_string(std::string_view name) {
    if (name == "paper_example") return InitialKind::paper_example;
    if (name == "polynomial") return InitialKind::polynomial;
    if (name == "eigenfunction") return InitialKind::eigenfunction;
    if (name == "sine") return InitialKind::sine;
    if (name == "sampled") return InitialKind::sampled;
    throw InvalidArgument("unknown initial condition kind '" + std::string(name) + "'");
}

double InitialCondition::operator()(double xi) const {
    switch (kind) {
        case InitialKind::paper_example:
            return (1.0 - 2.0 * xi) / 2.0 + 20.0 * xi * (1.0 - xi) * (xi - 0.6);
        case InitialKind::polynomial: return Coefficient(coeffs)(xi);
        case InitialKind::sine: return std::sin(static_cast<double>(index) * std::numbers::pi * xi);
        case InitialKind::eigenfunction:
        case InitialKind::sampled: break;
    }
    throw InvalidArgument("initial condition '" + std::string(to_string(kind)) +
                          "' has no closed form; sample it on a basis grid");
}

std::vector<double> InitialCondition::sample(const SpectralBasis& basis) const {
    const std::size_t n = basis.grid.size();
    if (kind == InitialKind::sampled) {
        if (samples.size() != n) {
            throw DimensionError("sampled initial condition has " + std::to_string(samples.size()) +
                                 " values, grid has " + std::to_string(n));
        }
        return samples;
    }
    if (kind == InitialKind::eigenfunction) {
        if (index == 0 || index > basis.size()) {
            throw InvalidArgument("initial condition eigenfunction index " + std::to_string(index) +
                                  " outside the basis (1.." + std::to_string(basis.size()) + ")");
        }
        return basis.eigenfunctions[index - 1];
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (*this)(basis.grid.nodes[i]);
    return out;
}

void SimulationConfig::validate() const {
    if (design.N == 0) throw InvalidArgument("simulation: design has N = 0");
    if (n_sim_modes <= design.N) {
        throw InvalidArgument("simulation: n_sim_modes (" + std::to_string(n_sim_modes) +
                              ") must exceed the truncation order N (" + std::to_string(design.N) + ")");
    }
    if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidArgument("simulation: dt and t_end must be positive");
    if (output_every == 0) throw InvalidArgument("simulation: output_every must be >= 1");
    if (std::abs(delay.D0() - design.D0) > 1e-12) {
        throw InvalidArgument("simulation: delay field and design disagree on D0");
    }
    const double delta = delay.delta_claimed();
    if (!(delta < design.D0)) {
        throw InvalidArgument("simulation: delta_claimed must be smaller than D0");
    }
    if (dt > (design.D0 - delta) / 10.0 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "simulation: dt = " << dt << " exceeds (D0 - delta)/10 = " << (design.D0 - delta) / 10.0;
        throw InvalidArgument(os.str());
    }
}

DelayedInput project_delayed_input(const SpectralBasis& basis, const ControllerDesign& design,
                                   const DelayField& delay, const ControlHistory& history, double t,
                                   std::size_t n_sim_modes) {
    const std::size_t N = design.N;
    if (n_sim_modes > basis.size() || N > basis.size()) {
        throw DimensionError("project_delayed_input: basis has too few modes");
    }
    if (history.dimension() != N) throw DimensionError("project_delayed_input: history dimension != N");
    const Grid& grid = basis.grid;
    const std::size_t n_nodes = grid.size();

    std::vector<double> u(n_nodes);
    std::vector<double> w(N);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double xi = grid.nodes[i];
        history.lookup(t - delay(t, xi), w);
        double acc = 0.0;
        for (std::size_t k = 0; k < N; ++k) acc += w[k] * basis.eigenfunctions[k][i];
        u[i] = grid.weights[i] * basis.rho[i] * acc;
    }
    DelayedInput out;
    out.v.assign(n_sim_modes, 0.0);
    for (std::size_t n = 0; n < n_sim_modes; ++n) {
        const auto& en = basis.eigenfunctions[n];
        double acc = 0.0;
        for (std::size_t i = 0; i < n_nodes; ++i) acc += u[i] * en[i];
        out.v[n] = acc;
    }
    history.lookup(t - design.D0, w);
    out.delta.resize(N);
    for (std::size_t k = 0; k < N; ++k) out.delta[k] = out.v[k] - w[k];
    return out;
}

double history_window(const SimulationConfig& config, const DeviationReport& deviation) {
    const double delta = std::max(config.delay.delta_claimed(), deviation.max_deviation);
    const double longest = std::max(config.design.D0 + delta, deviation.max_delay);
    return 1.05 * longest + 2.0 * config.dt;
}

namespace {

double l2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

DeviationReport scan_delay(const SimulationConfig& config) {
    const auto n_t = static_cast<std::size_t>(std::max(1001.0, std::ceil(config.t_end * 25.0)));
    return validate_deviation(config.delay, 101, n_t, std::max(config.t_end, 1.0));
}

}  // namespace

Simulator::Simulator(const SimulationConfig& config, const SpectralBasis& basis)
    : config_(config),
      basis_(basis),
      predictor_(config.design, config.dt, config.rule),
      history_(config.design.N, config.dt, history_window(config, scan_delay(config))) {
    config_.validate();
    if (basis.size() < config.n_sim_modes) {
        throw DimensionError("simulation: basis has " + std::to_string(basis.size()) +
                             " modes, n_sim_modes = " + std::to_string(config.n_sim_modes));
    }
    const auto y0 = config.y0.sample(basis);
    x_ = project(y0, basis, config.n_sim_modes);
    emit_control();
    v_now_ = project_delayed_input(basis_, config_.design, config_.delay, history_, 0.0, config_.n_sim_modes);
}

void Simulator::emit_control() {
    const double t = time();
    const std::size_t N = config_.design.N;
    std::span<const double> xN(x_.data(), N);
    if (config_.open_loop) {
        history_.push(std::vector<double>(N, 0.0));
        z_now_ = predictor_.artstein_state(t, xN, history_);
        return;
    }
    history_.push(predictor_.output(t, xN, history_, &z_now_));
}

void Simulator::step() {
    const double t = time();
    const double h = config_.dt;
    const std::size_t n = config_.n_sim_modes;
    const DelayedInput mid = project_delayed_input(basis_, config_.design, config_.delay, history_,
                                                   t + 0.5 * h, n);
    DelayedInput end = project_delayed_input(basis_, config_.design, config_.delay, history_, t + h, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = basis_.eigenvalues[k];
        const double x = x_[k];
        const double k1 = lam * x + v_now_.v[k];
        const double k2 = lam * (x + 0.5 * h * k1) + mid.v[k];
        const double k3 = lam * (x + 0.5 * h * k2) + mid.v[k];
        const double k4 = lam * (x + h * k3) + end.v[k];
        x_[k] = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(x_[k]) || std::abs(x_[k]) > 1e150) {
            std::ostringstream os;
            os << "modal state diverged at t = " << t + h;
            throw DivergenceError(os.str(), t + h);
        }
    }
    ++step_count_;
    v_now_ = std::move(end);
    emit_control();
}

SimulationRun run(const SimulationConfig& config, const SpectralBasis& basis) {
    config.validate();
    SimulationRun out;
    RunMetadata& meta = out.metadata;
    meta.rule = std::string(to_string(config.rule));
    meta.dt = config.dt;
    meta.t_end = config.t_end;
    meta.n_sim_modes = config.n_sim_modes;
    meta.grid_nodes = basis.grid.size();
    meta.eig_tol = config.eig_tol;
    meta.open_loop = config.open_loop;
    meta.deviation = scan_delay(config);
    meta.certificate_covered = meta.deviation.pass;
    meta.history_window = history_window(config, meta.deviation);

    Simulator sim(config, basis);
    const auto n_steps = static_cast<std::size_t>(std::llround(config.t_end / config.dt));
    out.times.reserve(n_steps + 1);
    auto record = [&]() {
        const std::size_t N = config.design.N;
        out.times.push_back(sim.time());
        out.x.emplace_back(sim.state().begin(), sim.state().end());
        std::vector<double> w(N);
        sim.history().at_index(static_cast<std::ptrdiff_t>(sim.history().count()) - 1, w);
        out.normU.push_back(l2(w));
        out.w.push_back(std::move(w));
        out.z.emplace_back(sim.last_artstein().begin(), sim.last_artstein().end());
        out.v_proj.emplace_back(sim.last_input().begin(), sim.last_input().end());
        out.delta_norm.push_back(l2(sim.last_delta()));
        out.normX.push_back(l2(sim.state()));
    };
    record();
    try {
        for (std::size_t s = 0; s < n_steps; ++s) {
            sim.step();
            record();
        }
    } catch (const DivergenceError& e) {
        out.diverged = true;
        out.divergence_time = e.time();
    }

    if (!out.diverged) {
        try {
            out.kappa_est = fit_decay(out.times, out.normX, meta.fit_window_fraction);
        } catch (const NumericalError&) {
            out.kappa_est = std::numeric_limits<double>::quiet_NaN();
        }
        const double t_start = out.times.back() * (1.0 - meta.fit_window_fraction);
        const auto first = std::lower_bound(out.times.begin(), out.times.end(), t_start) - out.times.begin();
        meta.decreasing_in_fit_window = out.normX.back() < out.normX[static_cast<std::size_t>(first)];
    }
    return out;
}

SimulationRun run(const SimulationConfig& config) {
    const Grid grid = make_simpson_grid(config.grid_nodes);
    const SpectralBasis basis = solve_eigensystem(config.problem, config.n_sim_modes, grid, config.eig_tol);
    return run(config, basis);
}

double fit_decay(std::span<const double> times, std::span<const double> normX, double window_fraction) {
    if (times.size() != normX.size()) throw DimensionError("fit_decay: times and norms differ in length");
    if (times.empty()) throw NumericalError("fit_decay: empty series");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw InvalidArgument("fit_decay: window_fraction must lie in (0, 1]");
    }
    const double t0 = times.front();
    const double t1 = times.back();
    const double start = t1 - window_fraction * (t1 - t0);
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < start - 1e-12) continue;
        if (!(normX[i] > 0.0)) {
            std::ostringstream os;
            os << "fit_decay: non-positive norm " << normX[i] << " at t = " << times[i];
            throw NumericalError(os.str());
        }
        xs.push_back(times[i]);
        ys.push_back(std::log(normX[i]));
    }
    if (xs.size() < 10) throw NumericalError("fit_decay: fewer than 10 samples in the fit window");
    const double c = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= c;
    my /= c;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    return -slope;
}

}  // namespace rdpredict
