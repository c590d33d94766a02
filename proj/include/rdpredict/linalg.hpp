#pragma once

#include <Eigen/Dense>

namespace rdpredict {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

bool is_diagonal(const Matrix& a);

/// e^{a t}. Exact for diagonal input, Pade scaling-and-squaring otherwise.
Matrix expm(const Matrix& a, double t = 1.0);

/// Norm induced by the Euclidean vector norm (largest singular value).
double induced_norm2(const Matrix& a);

/// Largest real part among the eigenvalues.
double spectral_abscissa(const Matrix& a);

bool is_hurwitz(const Matrix& a);

/// Upper bound ||e^{a t}|| <= e^{alpha t} sum_{k<n} (||N|| t)^k / k!, with
/// a = Q (D + N) Q^* a complex Schur form and alpha the spectral abscissa.
class ExpNormBound {
public:
    explicit ExpNormBound(const Matrix& a);

    double operator()(double t) const;
    double abscissa() const noexcept { return alpha_; }
    double nilpotent_norm() const noexcept { return nil_norm_; }
    Eigen::Index order() const noexcept { return n_; }

private:
    double alpha_ = 0.0;
    double nil_norm_ = 0.0;
    Eigen::Index n_ = 0;
};

}  // namespace rdpredict
