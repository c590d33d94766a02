#pragma once

#include "rdpredict/grid.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rdpredict {

/// Polynomial coefficient function c0 + c1*x + c2*x^2 + ... on [0, 1].
/// A single coefficient is the "constant" built-in.
class Coefficient {
public:
    Coefficient() : coeffs_{0.0} {}
    Coefficient(double value) : coeffs_{value} {}  // NOLINT(google-explicit-constructor)
    explicit Coefficient(std::vector<double> coeffs);

    static Coefficient constant(double value) { return Coefficient(value); }
    static Coefficient polynomial(std::vector<double> coeffs) { return Coefficient(std::move(coeffs)); }

    double operator()(double x) const noexcept {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    bool is_constant() const noexcept { return coeffs_.size() == 1; }
    const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    friend bool operator==(const Coefficient&, const Coefficient&) = default;

private:
    std::vector<double> coeffs_;
};

/// (p y')' + q y = lambda rho y on [0, 1] with
///   cos(theta1) y(0) - sin(theta1) y'(0) = 0,
///   cos(theta2) y(1) + sin(theta2) y'(1) = 0.
struct SturmLiouvilleProblem {
    Coefficient rho{1.0};
    Coefficient p{1.0};
    Coefficient q{0.0};
    double theta1 = 0.0;
    double theta2 = 0.0;

    /// Throws InvalidArgument if rho or p is non-positive at any grid node.
    void validate(const Grid& grid) const;
};

/// Eigenpairs sorted by decreasing eigenvalue, sampled on `grid`, orthonormal
/// for the rho-weighted quadrature inner product.
struct SpectralBasis {
    Grid grid;
    std::vector<double> rho;                       // rho at the grid nodes
    std::vector<double> eigenvalues;               // non-increasing
    std::vector<std::vector<double>> eigenfunctions;
    std::vector<std::vector<double>> derivatives;  // d/dxi of each eigenfunction

    std::size_t size() const noexcept { return eigenvalues.size(); }

    double inner(std::span<const double> f, std::span<const double> g) const;
    double norm(std::span<const double> f) const;
};

struct EigenSolverOptions {
    double scan_step = 0.25;
    double rel_tol = 1e-12;  // shooting integrator
    double abs_tol = 1e-14;
    std::size_t max_scan_steps = 200000;
    double min_refine_step = 1e-7;
};

SpectralBasis solve_eigensystem(const SturmLiouvilleProblem& problem, std::size_t n_modes,
                                const Grid& grid, double tol = 1e-10,
                                const EigenSolverOptions& options = {});

/// Coefficients <f, e_k> for k < n.
std::vector<double> project(std::span<const double> f, const SpectralBasis& basis, std::size_t n);

/// Pointwise sum of coeffs[k] * e_k on the basis grid.
std::vector<double> synthesize(std::span<const double> coeffs, const SpectralBasis& basis);

/// Sign changes of sampled values, ignoring samples below a relative noise floor.
std::size_t count_sign_changes(std::span<const double> values);

/// Characteristic function cos(theta2) y(1) + sin(theta2) y'(1) of the shooting
/// solution started from the left boundary condition.
double characteristic_function(const SturmLiouvilleProblem& problem, double lambda,
                               const Grid& grid, const EigenSolverOptions& options = {});

}  // namespace rdpredict
