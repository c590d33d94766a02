#include "rdpredict/pipeline.hpp"

#include "rdpredict/errors.hpp"
#include "rdpredict/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

namespace rdpredict {

namespace fs = std::filesystem;

std::string version() { return "0.1.0"; }

Config apply_overrides(Config c, const Overrides& o) {
    if (o.open_loop) c.sim.open_loop = *o.open_loop;
    if (o.dt) {
        if (!(*o.dt > 0.0)) throw ConfigError("sim.dt", "must be positive");
        c.sim.dt = *o.dt;
    }
    if (o.modes) {
        if (*o.modes == 0) throw ConfigError("basis.modes", "must be at least 1");
        c.modes = *o.modes;
    }
    if (o.rule) c.sim.rule = *o.rule;
    if (o.deltas) {
        for (double d : *o.deltas) {
            if (!(d >= 0.0)) throw ConfigError("sweep.deltas", "deltas must be non-negative");
        }
        c.sweep_deltas = *o.deltas;
    }
    return c;
}

json RunManifest::to_json() const {
    json t = json::object();
    for (const auto& s : timing) t[s.stage] = s.seconds;
    return json{{"command", command}, {"config_hash", config_hash}, {"outputs", outputs},
                {"version", version}, {"timing", t}};
}

namespace {

class Stopwatch {
public:
    explicit Stopwatch(RunManifest& m) : manifest_(m), start_(std::chrono::steady_clock::now()) {}

    void lap(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        manifest_.timing.push_back({stage, std::chrono::duration<double>(now - start_).count()});
        start_ = now;
    }

private:
    RunManifest& manifest_;
    std::chrono::steady_clock::time_point start_;
};

RunManifest start_manifest(const std::string& command, const Config& config, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    RunManifest m;
    m.command = command;
    m.config_hash = config_hash(config);
    m.version = version();
    return m;
}

void finish_manifest(RunManifest& m, const fs::path& out_dir) {
    write_json(out_dir / ("manifest_" + m.command + ".json"), m.to_json());
}

json matrix_rows(const Matrix& a) {
    std::vector<double> flat;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) flat.push_back(a(i, j));
    return flat;
}

double gram_error(const SpectralBasis& basis) {
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double g = basis.inner(basis.eigenfunctions[i], basis.eigenfunctions[j]);
            worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

}  // namespace

SpectralBasis solve_basis(const Config& config) {
    return solve_eigensystem(config.problem, config.modes, make_simpson_grid(config.grid_nodes), config.eig_tol);
}

json CertificateReport::to_json() const {
    return json{{"N", design.N},
                {"D0", design.D0},
                {"poles", design.poles},
                {"lambdas", design.lambdas},
                {"gamma", design.gamma},
                {"K", matrix_rows(design.K)},
                {"M", max.M},
                {"sigma", max.sigma},
                {"sigma_search", sigma_search},
                {"delta_max", max.delta_max},
                {"delta_max_capped", max.capped},
                {"delta", at_delta.delta},
                {"lhs_at_delta", at_delta.lhs},
                {"satisfied", at_delta.satisfied},
                {"identity_residual", design.identity_residual()}};
}

CertificateReport certify(const Config& config, const SpectralBasis& basis) {
    if (!config.design) throw ConfigError("design", "missing required section");
    const DesignSpec& d = *config.design;
    CertificateReport r;
    r.design = make_controller(config, basis);
    r.sigma_search = d.sigma_search && !d.sigma;
    EnvelopeOptions opt;
    opt.samples = d.envelope_samples;
    opt.sigma = d.sigma;
    r.max = max_delta(r.design.Acl, r.design.K, r.design.N, r.design.D0, r.sigma_search, opt);
    const DelayField delay = make_delay(config);
    r.at_delta = evaluate_certificate(r.design.Acl, r.design.K, r.max.M, r.max.sigma, r.design.N,
                                      delay.delta_claimed());
    return r;
}

std::vector<SweepRow> sweep(const Config& config, const SpectralBasis& basis, std::span<const double> deltas) {
    if (!config.design) throw ConfigError("design", "missing required section");
    const double D0 = config.design->D0;
    for (double d : deltas) {
        if (!(d >= 0.0 && d < D0)) throw ConfigError("sweep.deltas", "each delta must lie in [0, D0)");
    }
    auto one = [&config, &basis](double delta) {
        Config c = config;
        c.delay.kind = DelayKind::paper_example;
        c.delay.amplitude = delta;
        c.delay.delta_claimed.reset();
        c.sim.open_loop = false;
        const SimulationConfig sc = make_simulation_config(c, basis);
        const SimulationRun r = run(sc, basis);
        SweepRow row;
        row.delta = delta;
        row.kappa_est = r.kappa_est;
        row.diverged = r.diverged || !(r.kappa_est > 0.0);
        return row;
    };
    std::vector<std::future<SweepRow>> jobs;
    for (double d : deltas) jobs.push_back(std::async(std::launch::async, one, d));
    std::vector<SweepRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.delta < b.delta; });
    return rows;
}

std::vector<std::string> basis_header(const SpectralBasis& basis) {
    std::vector<std::string> h{"xi"};
    for (double l : basis.eigenvalues) h.push_back(format_double(l));
    return h;
}

std::vector<std::string> run_header(std::size_t n_sim_modes, std::size_t N) {
    std::vector<std::string> h{"t"};
    for (std::size_t i = 1; i <= n_sim_modes; ++i) h.push_back("x_" + std::to_string(i));
    for (std::size_t k = 1; k <= N; ++k) h.push_back("w_" + std::to_string(k));
    h.insert(h.end(), {"normX", "normU", "delta_norm"});
    return h;
}

json spectrum_json(const SpectralBasis& basis) {
    std::vector<std::size_t> zeros;
    for (const auto& e : basis.eigenfunctions) zeros.push_back(count_sign_changes(e));
    return json{{"eigenvalues", basis.eigenvalues},
                {"n_modes", basis.size()},
                {"grid_nodes", basis.grid.size()},
                {"gram_max_error", gram_error(basis)},
                {"oscillation_indices", zeros}};
}

json run_metadata_json(const Config& config, const SimulationRun& run,
                       const std::optional<CertificateReport>& certificate) {
    const RunMetadata& m = run.metadata;
    json j{{"config", to_json(config)},
           {"config_hash", config_hash(config)},
           {"rule", m.rule},
           {"dt", m.dt},
           {"t_end", m.t_end},
           {"n_sim_modes", m.n_sim_modes},
           {"grid_nodes", m.grid_nodes},
           {"eig_tol", m.eig_tol},
           {"open_loop", m.open_loop},
           {"history_window", m.history_window},
           {"kappa_est", run.kappa_est},
           {"fit_window_fraction", m.fit_window_fraction},
           {"decreasing_in_fit_window", m.decreasing_in_fit_window},
           {"diverged", run.diverged},
           {"divergence_time", run.divergence_time},
           {"normX_initial", run.normX.front()},
           {"normX_final", run.normX.back()},
           {"max_normU", max_of(run.normU)},
           {"max_delta_norm", max_of(run.delta_norm)},
           {"deviation",
            {{"max_deviation", m.deviation.max_deviation},
             {"min_delay", m.deviation.min_delay},
             {"max_delay", m.deviation.max_delay},
             {"within_claimed", m.deviation.pass},
             {"positive", m.deviation.positive},
             {"monotone", m.deviation.monotone}}},
           {"certificate_covered", m.certificate_covered}};
    if (m.kappa_bound) j["kappa_bound"] = *m.kappa_bound;
    if (certificate) j["certificate"] = certificate->to_json();
    return j;
}

void write_basis_csv(const fs::path& path, const SpectralBasis& basis) {
    CsvWriter csv(path, basis_header(basis));
    std::vector<double> row(basis.size() + 1);
    for (std::size_t i = 0; i < basis.grid.size(); ++i) {
        row[0] = basis.grid.nodes[i];
        for (std::size_t k = 0; k < basis.size(); ++k) row[k + 1] = basis.eigenfunctions[k][i];
        csv.row(row);
    }
    csv.close();
}

void write_run_csv(const fs::path& path, const SimulationRun& run, std::size_t every) {
    if (run.times.empty()) throw InvalidArgument("write_run_csv: empty run");
    const std::size_t n = run.x.front().size();
    const std::size_t N = run.w.front().size();
    CsvWriter csv(path, run_header(n, N));
    if (every == 0) every = 1;
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        if (i % every != 0 && i + 1 != run.times.size()) continue;
        const double tail[3] = {run.normX[i], run.normU[i], run.delta_norm[i]};
        csv.row({std::span<const double>(&run.times[i], 1), run.x[i], run.w[i], tail});
    }
    csv.close();
}

void write_delay_csv(const fs::path& path, const DelayField& delay, double t_end, std::size_t n_t,
                     std::size_t n_xi) {
    CsvWriter csv(path, {"t", "xi", "D"});
    for (std::size_t it = 0; it < n_t; ++it) {
        const double t = t_end * static_cast<double>(it) / static_cast<double>(n_t - 1);
        for (std::size_t ix = 0; ix < n_xi; ++ix) {
            const double xi = static_cast<double>(ix) / static_cast<double>(n_xi - 1);
            const double row[3] = {t, xi, evaluate_delay(delay, t, xi)};
            csv.row(row);
        }
    }
    csv.close();
}

RunManifest cmd_eig(const Config& config, const fs::path& out_dir) {
    RunManifest m = start_manifest("eig", config, out_dir);
    Stopwatch clock(m);
    const SpectralBasis basis = solve_basis(config);
    clock.lap("solve_eigensystem");
    write_basis_csv(out_dir / "basis.csv", basis);
    write_json(out_dir / "spectrum.json", spectrum_json(basis));
    clock.lap("write");
    m.outputs = {(out_dir / "basis.csv").string(), (out_dir / "spectrum.json").string()};
    finish_manifest(m, out_dir);
    return m;
}

RunManifest cmd_certify(const Config& config, const fs::path& out_dir) {
    RunManifest m = start_manifest("certify", config, out_dir);
    Stopwatch clock(m);
    const SpectralBasis basis = solve_basis(config);
    clock.lap("solve_eigensystem");
    const CertificateReport cert = certify(config, basis);
    clock.lap("certify");
    write_json(out_dir / "certificate.json", cert.to_json());
    m.outputs = {(out_dir / "certificate.json").string()};
    finish_manifest(m, out_dir);
    return m;
}

RunManifest cmd_simulate(const Config& config, const fs::path& out_dir) {
    RunManifest m = start_manifest("simulate", config, out_dir);
    Stopwatch clock(m);
    const SpectralBasis basis = solve_basis(config);
    clock.lap("solve_eigensystem");
    const SimulationConfig sc = make_simulation_config(config, basis);

    std::optional<CertificateReport> cert;
    if (!config.sim.open_loop) cert = certify(config, basis);
    clock.lap("certify");

    // Sensitivity to the quadrature rule, reported next to the main run.
    SimulationConfig other = sc;
    other.rule = sc.rule == QuadratureRule::left_riemann ? QuadratureRule::trapezoid : QuadratureRule::left_riemann;
    auto alt = std::async(std::launch::async, [&]() { return run(other, basis); });
    SimulationRun r = run(sc, basis);
    const SimulationRun r_alt = alt.get();
    if (cert && cert->at_delta.satisfied) {
        r.metadata.kappa_bound = std::min(cert->max.sigma, 0.5 * cert->design.gamma);
    }
    clock.lap("simulate");

    json meta = run_metadata_json(config, r, cert);
    if (!r.diverged && !r_alt.diverged) {
        meta["rule_sensitivity"] = {{"other_rule", std::string(to_string(other.rule))},
                                    {"other_normX_final", r_alt.normX.back()},
                                    {"relative_difference",
                                     std::abs(r_alt.normX.back() - r.normX.back()) / r.normX.back()}};
    }
    write_run_csv(out_dir / "run.csv", r, config.sim.output_every);
    write_json(out_dir / "run_meta.json", meta);
    write_basis_csv(out_dir / "basis.csv", basis);
    write_delay_csv(out_dir / "delay.csv", sc.delay, r.times.back());
    clock.lap("write");
    m.outputs = {(out_dir / "run.csv").string(), (out_dir / "run_meta.json").string(),
                 (out_dir / "basis.csv").string(), (out_dir / "delay.csv").string()};
    finish_manifest(m, out_dir);
    return m;
}

RunManifest cmd_sweep(const Config& config, const fs::path& out_dir) {
    RunManifest m = start_manifest("sweep", config, out_dir);
    Stopwatch clock(m);
    const SpectralBasis basis = solve_basis(config);
    clock.lap("solve_eigensystem");
    const auto rows = sweep(config, basis, config.sweep_deltas);
    clock.lap("sweep");
    CsvWriter csv(out_dir / "sweep.csv", {"delta", "kappa_est", "diverged"});
    for (const auto& row : rows) {
        const double v[3] = {row.delta, row.kappa_est, row.diverged ? 1.0 : 0.0};
        csv.row(v);
    }
    csv.close();
    clock.lap("write");
    m.outputs = {(out_dir / "sweep.csv").string()};
    finish_manifest(m, out_dir);
    return m;
}

}  // namespace rdpredict
