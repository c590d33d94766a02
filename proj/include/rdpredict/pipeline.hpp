#pragma once

#include "rdpredict/config.hpp"
#include "rdpredict/sim.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rdpredict {

std::string version();

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<bool> open_loop;
    std::optional<double> dt;
    std::optional<std::size_t> modes;
    std::optional<QuadratureRule> rule;
    std::optional<std::vector<double>> deltas;
};

Config apply_overrides(Config config, const Overrides& overrides);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::vector<std::string> outputs;
    std::string version;
    std::vector<StageTiming> timing;

    json to_json() const;
};

struct CertificateReport {
    ControllerDesign design;
    MaxDeltaResult max;
    SmallGainCertificate at_delta;  // evaluated at delta_claimed of the configured delay
    bool sigma_search = true;

    json to_json() const;
};

CertificateReport certify(const Config& config, const SpectralBasis& basis);

struct SweepRow {
    double delta = 0.0;
    double kappa_est = 0.0;
    bool diverged = false;
};

/// One closed-loop run per delta with the paper_example delay scaled to that
/// amplitude. Rows are independent and run concurrently; output is sorted by delta.
std::vector<SweepRow> sweep(const Config& config, const SpectralBasis& basis, std::span<const double> deltas);

SpectralBasis solve_basis(const Config& config);

/// Column names and JSON bodies of the artifacts.
std::vector<std::string> basis_header(const SpectralBasis& basis);
std::vector<std::string> run_header(std::size_t n_sim_modes, std::size_t N);
json spectrum_json(const SpectralBasis& basis);
json run_metadata_json(const Config& config, const SimulationRun& run,
                       const std::optional<CertificateReport>& certificate);

void write_basis_csv(const std::filesystem::path& path, const SpectralBasis& basis);
void write_run_csv(const std::filesystem::path& path, const SimulationRun& run, std::size_t every);
void write_delay_csv(const std::filesystem::path& path, const DelayField& delay, double t_end,
                     std::size_t n_t = 401, std::size_t n_xi = 51);

RunManifest cmd_eig(const Config& config, const std::filesystem::path& out_dir);
RunManifest cmd_certify(const Config& config, const std::filesystem::path& out_dir);
RunManifest cmd_simulate(const Config& config, const std::filesystem::path& out_dir);
RunManifest cmd_sweep(const Config& config, const std::filesystem::path& out_dir);

}  // namespace rdpredict
