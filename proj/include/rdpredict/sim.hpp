#pragma once

#include "rdpredict/control.hpp"
#include "rdpredict/delay.hpp"
#include "rdpredict/design.hpp"
#include "rdpredict/history.hpp"
#include "rdpredict/spectral.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rdpredict {

enum class InitialKind { paper_example, polynomial, eigenfunction, sine, sampled };

std::string_view to_string(InitialKind kind);
InitialKind initial_kind_from_string(std::string_view name);

/// Initial profile y0 on [0, 1].
///   paper_example  (1 - 2 xi)/2 + 20 xi (1 - xi)(xi - 3/5)
///   polynomial     sum coeffs[i] xi^i
///   eigenfunction  e_index (1-based) of the problem's basis
///   sine           sin(index pi xi)
///   sampled        values on the simulation grid
struct InitialCondition {
    InitialKind kind = InitialKind::paper_example;
    std::vector<double> coeffs;
    std::size_t index = 1;
    std::vector<double> samples;

    static InitialCondition paper_example() { return {}; }

    /// Samples on the basis grid. Eigenfunction profiles are taken from `basis`.
    std::vector<double> sample(const SpectralBasis& basis) const;
    /// Pointwise value for the analytic kinds.
    double operator()(double xi) const;
};

struct SimulationConfig {
    SturmLiouvilleProblem problem;
    std::size_t n_sim_modes = 20;
    std::size_t grid_nodes = 201;
    double eig_tol = 1e-10;
    ControllerDesign design;
    DelayField delay = DelayField::paper_example();
    InitialCondition y0;
    double t_end = 30.0;
    double dt = 1e-3;
    QuadratureRule rule = QuadratureRule::left_riemann;
    bool open_loop = false;
    std::size_t output_every = 1;

    /// Throws InvalidArgument when n_sim_modes <= N, dt is too coarse for the
    /// shortest delay, or D0 is not a multiple of dt.
    void validate() const;
};

struct DelayedInput {
    std::vector<double> v;      // <v(t), e_n>, n < n_sim_modes
    std::vector<double> delta;  // v_n - w_n(t - D0), n < N
};

/// Modal projections of the distributed delayed input
///   v(t, xi) = sum_k w_k(t - D(t, xi)) e_k(xi).
DelayedInput project_delayed_input(const SpectralBasis& basis, const ControllerDesign& design,
                                   const DelayField& delay, const ControlHistory& history, double t,
                                   std::size_t n_sim_modes);

struct RunMetadata {
    std::string rule;
    double dt = 0.0;
    double t_end = 0.0;
    std::size_t n_sim_modes = 0;
    std::size_t grid_nodes = 0;
    double eig_tol = 0.0;
    bool open_loop = false;
    double history_window = 0.0;
    DeviationReport deviation;
    bool certificate_covered = false;   // deviation validated against delta_claimed
    bool decreasing_in_fit_window = false;
    double fit_window_fraction = 1.0 / 3.0;
    std::optional<double> kappa_bound;  // min(sigma, gamma / 2) when a certificate is attached
};

struct SimulationRun {
    std::vector<double> times;
    std::vector<std::vector<double>> x;        // n_sim_modes per instant
    std::vector<std::vector<double>> w;        // N per instant
    std::vector<std::vector<double>> z;        // Artstein variable, N per instant
    std::vector<std::vector<double>> v_proj;   // n_sim_modes per instant
    std::vector<double> delta_norm;
    std::vector<double> normX;
    std::vector<double> normU;
    double kappa_est = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;
    double divergence_time = std::numeric_limits<double>::quiet_NaN();
    RunMetadata metadata;
};

/// Closed-loop modal integrator: RK4 on x_n' = lambda_n x_n + v_n(t), with the
/// predictor appending w at every grid instant.
class Simulator {
public:
    Simulator(const SimulationConfig& config, const SpectralBasis& basis);

    double time() const noexcept { return static_cast<double>(step_count_) * config_.dt; }
    std::span<const double> state() const noexcept { return x_; }
    const ControlHistory& history() const noexcept { return history_; }
    std::span<const double> last_input() const noexcept { return v_now_.v; }
    std::span<const double> last_delta() const noexcept { return v_now_.delta; }
    std::span<const double> last_artstein() const noexcept { return z_now_; }

    /// Advances by one dt. Throws DivergenceError on non-finite state.
    void step();

private:
    void emit_control();

    SimulationConfig config_;
    const SpectralBasis& basis_;
    Predictor predictor_;
    ControlHistory history_;
    std::vector<double> x_;
    DelayedInput v_now_;
    std::vector<double> z_now_;
    std::size_t step_count_ = 0;
};

/// Sizing of the control history for a configuration.
double history_window(const SimulationConfig& config, const DeviationReport& deviation);

SimulationRun run(const SimulationConfig& config, const SpectralBasis& basis);
SimulationRun run(const SimulationConfig& config);

/// kappa = -slope of the least-squares line through log(normX) over the final
/// `window_fraction` of the time span. Positive means decay.
double fit_decay(std::span<const double> times, std::span<const double> normX,
                 double window_fraction = 1.0 / 3.0);

}  // namespace rdpredict
