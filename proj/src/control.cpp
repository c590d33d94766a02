#include "rdpredict/control.hpp"

#include "rdpredict/errors.hpp"

#include <cmath>
#include <sstream>

namespace rdpredict {

std::string_view to_string(QuadratureRule rule) {
    return rule == QuadratureRule::trapezoid ? "trapezoid" : "left";
}

QuadratureRule quadrature_rule_from_string(std::string_view name) {
    if (name == "left" || name == "left_riemann") return QuadratureRule::left_riemann;
    if (name == "trapezoid") return QuadratureRule::trapezoid;
    throw InvalidArgument("unknown quadrature rule '" + std::string(name) + "' (expected left|trapezoid)");
}

Predictor::Predictor(const ControllerDesign& design, double h, QuadratureRule rule)
    : design_(design), h_(h), rule_(rule), phi_{design.t0} {
    if (!(h > 0.0)) throw InvalidArgument("predictor: step must be positive");
    if (design.N == 0 || design.K.rows() != static_cast<Eigen::Index>(design.N)) {
        throw DimensionError("predictor: design gain does not match N");
    }
    const double ratio = design.D0 / h;
    const double m = std::round(ratio);
    if (m < 1.0 || std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream os;
        os << "predictor: nominal delay " << design.D0 << " is not a multiple of the step " << h;
        throw InvalidArgument(os.str());
    }
    m_ = static_cast<std::size_t>(m);
    const std::size_t n = design.N;
    kernel_.resize((m_ + 1) * n);
    for (std::size_t i = 0; i <= m_; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            kernel_[i * n + k] = std::exp(-static_cast<double>(i) * h_ * design.lambdas[k]);
        }
    }
}

std::ptrdiff_t Predictor::grid_index(double t) const {
    const double pos = t / h_;
    const double j = std::round(pos);
    if (std::abs(pos - j) > 1e-7) {
        std::ostringstream os;
        os << "predictor evaluated at t = " << t << ", off the control grid of step " << h_;
        throw InvalidArgument(os.str());
    }
    return static_cast<std::ptrdiff_t>(j);
}

void Predictor::accumulate(std::ptrdiff_t j, const ControlHistory& history, bool include_current,
                           std::span<double> acc) const {
    const std::size_t n = design_.N;
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto m = static_cast<std::ptrdiff_t>(m_);
    const std::ptrdiff_t first_index = j - m;
    // Samples before t = 0 are zero.
    const std::ptrdiff_t i_begin = std::max<std::ptrdiff_t>(0, -first_index);
    const std::ptrdiff_t i_end = include_current ? m : m - 1;
    for (std::ptrdiff_t i = i_begin; i <= i_end; ++i) {
        double weight = h_;
        if (rule_ == QuadratureRule::trapezoid && (i == 0 || i == m)) weight = 0.5 * h_;
        const double* kern = &kernel_[static_cast<std::size_t>(i) * n];
        for (std::size_t k = 0; k < n; ++k) {
            acc[k] += weight * kern[k] * history.at_index(first_index + i, k);
        }
    }
}

std::vector<double> Predictor::integral(double t, const ControlHistory& history) const {
    std::vector<double> acc(design_.N, 0.0);
    accumulate(grid_index(t), history, rule_ == QuadratureRule::trapezoid, acc);
    return acc;
}

std::vector<double> Predictor::artstein_state(double t, std::span<const double> x,
                                              const ControlHistory& history) const {
    if (x.size() != design_.N) throw DimensionError("artstein_state: x must have length N");
    std::vector<double> z = integral(t, history);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += x[k];
    return z;
}

std::vector<double> Predictor::output(double t, std::span<const double> x,
                                      const ControlHistory& history, std::vector<double>* z) const {
    const std::size_t n = design_.N;
    if (x.size() != n) throw DimensionError("predictor_output: x must have length N");
    const double phi = phi_(t);
    std::vector<double> w(n, 0.0);

    Vector acc(static_cast<Eigen::Index>(n));
    accumulate(grid_index(t), history, false, std::span<double>(acc.data(), n));
    for (std::size_t k = 0; k < n; ++k) acc(static_cast<Eigen::Index>(k)) += x[k];
    if (phi == 0.0) {
        if (z) z->assign(acc.data(), acc.data() + n);
        return w;
    }
    Vector rhs = phi * (design_.K * acc);

    if (rule_ == QuadratureRule::trapezoid) {
        Matrix sys = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) {
            const double e = kernel_[m_ * n + k];  // exp(-D0 lambda_k)
            sys.col(static_cast<Eigen::Index>(k)) -= phi * 0.5 * h_ * e * design_.K.col(static_cast<Eigen::Index>(k));
        }
        Eigen::FullPivLU<Matrix> lu(sys);
        if (!lu.isInvertible() || lu.rcond() < 1e-12) {
            std::ostringstream os;
            os << "trapezoid predictor system is singular at t = " << t << "; reduce the step h = " << h_;
            throw StepSizeError(os.str());
        }
        rhs = lu.solve(rhs);
    }
    for (std::size_t k = 0; k < n; ++k) w[k] = rhs(static_cast<Eigen::Index>(k));
    if (z) {
        z->assign(acc.data(), acc.data() + n);
        if (rule_ == QuadratureRule::trapezoid) {
            for (std::size_t k = 0; k < n; ++k) (*z)[k] += 0.5 * h_ * kernel_[m_ * n + k] * w[k];
        }
    }
    return w;
}

}  // namespace rdpredict
