#pragma once

#include "rdpredict/control.hpp"
#include "rdpredict/delay.hpp"
#include "rdpredict/design.hpp"
#include "rdpredict/sim.hpp"
#include "rdpredict/spectral.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rdpredict {

using json = nlohmann::json;

struct DesignSpec {
    double margin = 0.0;
    double D0 = 1.0;
    std::optional<std::vector<double>> poles;  // nullopt: keep the plant poles (K = 0)
    double t0 = 0.2;
    bool sigma_search = true;
    std::optional<double> sigma;
    std::size_t envelope_samples = 10000;
};

struct DelaySpec {
    DelayKind kind = DelayKind::paper_example;
    double amplitude = 0.23;
    double omega = 1.0;
    double phase = 0.0;
    std::string path;                     // custom_sampled table
    std::optional<double> delta_claimed;
};

struct SimSpec {
    double t_end = 30.0;
    double dt = 1e-3;
    QuadratureRule rule = QuadratureRule::left_riemann;
    bool open_loop = false;
    std::size_t output_every = 1;
    InitialCondition y0;
};

/// Fully resolved configuration. Sections: problem, basis, design, delay, sim,
/// sweep. Everything except `problem` has defaults.
struct Config {
    SturmLiouvilleProblem problem;
    std::size_t modes = 20;
    std::size_t grid_nodes = 201;
    double eig_tol = 1e-10;
    std::optional<DesignSpec> design;
    DelaySpec delay;
    SimSpec sim;
    std::vector<double> sweep_deltas;
};

/// Throws ConfigError naming the offending key path ("problem.p", ...).
Config parse_config(const json& doc);
Config load_config(const std::filesystem::path& path);

/// Canonical echo of a resolved config; parse_config(to_json(c)) == c.
json to_json(const Config& config);

/// FNV-1a 64 of the canonical echo, as 16 hex digits.
std::string config_hash(const Config& config);

/// Accepts a number or "pi", "pi/3", "2*pi/5", "-pi/4".
double parse_angle(const json& value, const std::string& key);

DelayField make_delay(const Config& config);
ControllerDesign make_controller(const Config& config, const SpectralBasis& basis);
SimulationConfig make_simulation_config(const Config& config, const SpectralBasis& basis);

std::vector<double> default_sweep_deltas();

}  // namespace rdpredict
