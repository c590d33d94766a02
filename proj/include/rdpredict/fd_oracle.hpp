#pragma once

#include "rdpredict/grid.hpp"
#include "rdpredict/sim.hpp"

#include <cstddef>
#include <vector>

namespace rdpredict {

struct FdOptions {
    std::size_t nodes = 201;            // odd, so the Simpson norm applies
    double dt = 0.0;                    // 0: use the simulation step
    std::vector<double> output_times;   // empty: only t_end
    bool zero_input = false;            // ignore the control history
};

struct FdResult {
    Grid grid;
    std::vector<double> rho;
    std::vector<double> times;
    std::vector<std::vector<double>> states;

    /// rho-weighted L2 norm of a state on this grid.
    double norm(const std::vector<double>& y) const;
};

/// Method-of-lines solution of
///   y_t = (1/rho)(p y_xi)_xi + (q/rho) y + u(t - D(t, xi), xi)
/// on a uniform grid: second-order central differences, ghost-node Robin
/// conditions, Crank-Nicolson in time with a backward-Euler start. The input is
/// u(s, xi) = sum_k w_k(s) e_k(xi) with w taken from `run`.
FdResult fd_oracle(const SimulationConfig& config, const SimulationRun& run, const FdOptions& options = {});

/// Relative rho-weighted L2 distance between the modal state synthesized on
/// `basis` and an oracle state on the same grid.
double relative_l2_discrepancy(const SpectralBasis& basis, const std::vector<double>& modal_coeffs,
                               const std::vector<double>& oracle_state);

struct FdConvergenceReport {
    std::size_t coarse_nodes = 0;
    std::size_t fine_nodes = 0;
    double coarse_discrepancy = 0.0;
    double fine_discrepancy = 0.0;
    double ratio = 0.0;   // coarse / fine
    bool converged = false;  // ratio >= 2
};

/// Runs the modal simulation and the oracle at `nodes` and at doubled
/// resolution and compares the states at time `t_compare`.
FdConvergenceReport fd_convergence_report(const SimulationConfig& config, double t_compare,
                                          std::size_t nodes = 201);

}  // namespace rdpredict
