// rdpredict: spectrum, certificate, simulation and delay sweeps from a JSON config.

#include "rdpredict/errors.hpp"
#include "rdpredict/pipeline.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <sstream>

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalError = 3 };

std::vector<double> parse_deltas(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw rdpredict::ConfigError("sweep.deltas", "cannot read '" + item + "' as a number");
        }
    }
    if (out.empty()) throw rdpredict::ConfigError("sweep.deltas", "empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Predictor feedback for reaction-diffusion PDEs with uncertain distributed input delay"};
    app.set_version_flag("--version", rdpredict::version());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    bool open_loop = false;
    double dt = 0.0;
    std::size_t modes = 0;
    std::string rule;
    std::string deltas;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out-dir", out_dir, "Directory for the artifacts");
        sub->add_option("--modes", modes, "Number of modes (overrides basis.modes)");
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--dt", dt, "Time step (overrides sim.dt)");
        sub->add_option("--rule", rule, "Predictor quadrature")->check(CLI::IsMember({"left", "trapezoid"}));
    };

    CLI::App* eig = app.add_subcommand("eig", "Eigenvalues and sampled eigenfunctions");
    add_common(eig);
    CLI::App* certify = app.add_subcommand("certify", "Gain design and small-gain certificate");
    add_common(certify);
    CLI::App* simulate = app.add_subcommand("simulate", "Closed-loop (or open-loop) simulation");
    add_common(simulate);
    add_sim(simulate);
    simulate->add_flag("--open-loop", open_loop, "Apply no control");
    CLI::App* sweep = app.add_subcommand("sweep", "Decay rate versus delay amplitude");
    add_common(sweep);
    add_sim(sweep);
    sweep->add_option("--deltas", deltas, "Comma-separated delay amplitudes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        rdpredict::Overrides o;
        if (open_loop) o.open_loop = true;
        if (dt > 0.0) o.dt = dt;
        if (modes > 0) o.modes = modes;
        if (!rule.empty()) o.rule = rdpredict::quadrature_rule_from_string(rule);
        if (!deltas.empty()) o.deltas = parse_deltas(deltas);
        const rdpredict::Config config = rdpredict::apply_overrides(rdpredict::load_config(config_path), o);

        rdpredict::RunManifest m;
        if (eig->parsed()) m = rdpredict::cmd_eig(config, out_dir);
        else if (certify->parsed()) m = rdpredict::cmd_certify(config, out_dir);
        else if (simulate->parsed()) m = rdpredict::cmd_simulate(config, out_dir);
        else m = rdpredict::cmd_sweep(config, out_dir);
        for (const auto& path : m.outputs) std::printf("%s\n", path.c_str());
        return kOk;
    } catch (const rdpredict::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const rdpredict::InvalidArgument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kConfigError;
    } catch (const rdpredict::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
