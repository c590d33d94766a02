#pragma once

#include "rdpredict/design.hpp"
#include "rdpredict/history.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace rdpredict {

/// Linear ramp from 0 at t = 0 to 1 at t = t0.
struct TransitionSignal {
    double t0 = 0.2;

    double operator()(double t) const noexcept {
        if (t <= 0.0) return 0.0;
        if (t >= t0) return 1.0;
        return t / t0;
    }
};

inline double transition(const TransitionSignal& phi, double t) noexcept { return phi(t); }

enum class QuadratureRule { left_riemann, trapezoid };

std::string_view to_string(QuadratureRule rule);
QuadratureRule quadrature_rule_from_string(std::string_view name);

/// Constant-delay predictor feedback
///   w(t) = phi(t) K ( x(t) + int_{t-D0}^{t} e^{(t-D0-s) Lambda} w(s) ds )
/// with the integral discretized on the history grid (step h, D0 = m h).
///
/// The left rule uses nodes s = t - D0 + i h, i = 0..m-1, so w(t) follows
/// explicitly from strictly past samples. The trapezoid rule also weights
/// s = t and solves the N x N system
///   (I - phi(t) (h/2) K e^{-D0 Lambda}) w(t) = rhs.
class Predictor {
public:
    Predictor(const ControllerDesign& design, double h, QuadratureRule rule = QuadratureRule::left_riemann);

    const ControllerDesign& design() const noexcept { return design_; }
    QuadratureRule rule() const noexcept { return rule_; }
    double step() const noexcept { return h_; }
    std::size_t nodes_per_delay() const noexcept { return m_; }
    const TransitionSignal& transition() const noexcept { return phi_; }

    /// Discretized integral term at grid time t. For the trapezoid rule the
    /// sample at t itself must already be in the history.
    std::vector<double> integral(double t, const ControlHistory& history) const;

    /// w(t) from the modal state x(t) (length N) and the past control samples.
    /// When `z` is given it receives the matching Artstein variable.
    std::vector<double> output(double t, std::span<const double> x, const ControlHistory& history,
                               std::vector<double>* z = nullptr) const;

    /// Artstein variable z(t) = x(t) + integral term. Diagnostic only.
    std::vector<double> artstein_state(double t, std::span<const double> x,
                                       const ControlHistory& history) const;

private:
    std::ptrdiff_t grid_index(double t) const;
    // Sum over nodes i in [first, last] of weight_i e^{-i h Lambda} w(s_i).
    void accumulate(std::ptrdiff_t j, const ControlHistory& history, bool include_current,
                    std::span<double> acc) const;

    ControllerDesign design_;
    double h_;
    QuadratureRule rule_;
    std::size_t m_;
    TransitionSignal phi_;
    std::vector<double> kernel_;  // kernel_[i * N + k] = exp(-i h lambda_k), i = 0..m
};

}  // namespace rdpredict
