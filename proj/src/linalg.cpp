#include "rdpredict/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace rdpredict {

bool is_diagonal(const Matrix& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j && a(i, j) != 0.0) return false;
    return true;
}

Matrix expm(const Matrix& a, double t) {
    if (is_diagonal(a)) {
        Matrix out = Matrix::Zero(a.rows(), a.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, i) = std::exp(a(i, i) * t);
        return out;
    }
    const Matrix at = a * t;
    return at.exp();
}

double induced_norm2(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

double spectral_abscissa(const Matrix& a) {
    if (is_diagonal(a)) return a.diagonal().maxCoeff();
    Eigen::EigenSolver<Matrix> es(a, false);
    return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& a) { return a.size() > 0 && spectral_abscissa(a) < 0.0; }

ExpNormBound::ExpNormBound(const Matrix& a) : n_(a.rows()) {
    if (is_diagonal(a)) {
        alpha_ = a.diagonal().maxCoeff();
        return;
    }
    Eigen::ComplexSchur<Matrix> schur(a);
    const Eigen::MatrixXcd& tri = schur.matrixT();
    alpha_ = tri.diagonal().real().maxCoeff();
    Eigen::MatrixXcd nil = tri.triangularView<Eigen::StrictlyUpper>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(nil);
    nil_norm_ = svd.singularValues()(0);
}

double ExpNormBound::operator()(double t) const {
    double term = 1.0;
    double sum = 1.0;
    for (Eigen::Index k = 1; k < n_; ++k) {
        term *= nil_norm_ * t / static_cast<double>(k);
        sum += term;
    }
    return std::exp(alpha_ * t) * sum;
}

}  // namespace rdpredict
