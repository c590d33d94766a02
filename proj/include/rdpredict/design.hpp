#pragma once

#include "rdpredict/linalg.hpp"
#include "rdpredict/spectral.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rdpredict {

struct Truncation {
    std::size_t N = 0;
    double gamma = 0.0;  // -lambda_{N+1}
};

/// N = number of modes with lambda >= -margin (at least 1); gamma = -lambda_{N+1}.
Truncation select_truncation(std::span<const double> eigenvalues, double margin = 0.0);

struct ControllerDesign {
    std::size_t N = 0;
    std::vector<double> lambdas;  // diagonal of Lambda
    double gamma = 0.0;
    double D0 = 1.0;
    std::vector<double> poles;
    Matrix Acl;
    Matrix K;
    double t0 = 0.2;

    Matrix Lambda() const;
    /// || Lambda + e^{-D0 Lambda} K - Acl ||_2
    double identity_residual() const;
};

struct PolePlacement {
    Matrix Acl;
    Matrix K;
};

/// K = e^{D0 Lambda} (Acl - Lambda) with Acl = diag(poles).
PolePlacement place_poles(std::span<const double> lambdas, double D0, std::span<const double> poles);

ControllerDesign make_design(std::span<const double> eigenvalues, double margin, double D0,
                             std::span<const double> poles, double t0);

/// Design that keeps Acl = Lambda (K = 0). Requires the retained modes to be stable.
ControllerDesign make_zero_gain_design(std::span<const double> eigenvalues, double margin,
                                       double D0, double t0);

struct DecayEnvelope {
    double M = 1.0;
    double sigma = 0.0;
    double horizon = 0.0;
};

struct EnvelopeOptions {
    std::size_t samples = 10000;
    double sigma_fraction = 0.99;   // of |spectral abscissa|, when sigma is not given
    std::optional<double> sigma;
};

/// Constants with ||e^{Acl t}|| <= M e^{-sigma t} for all t >= 0. The sampling
/// horizon is chosen from the Schur tail bound so that no larger ratio exists
/// beyond it; sampled maxima are refined by golden-section search.
DecayEnvelope decay_envelope(const Matrix& Acl, const EnvelopeOptions& options = {});

/// sqrt(N) * sum_k ||K_k||
double gain_constant(const Matrix& K);

/// Left-hand side of the small-gain condition.
double small_gain_lhs(const Matrix& Acl, const Matrix& K, double M, double sigma, std::size_t N,
                      double delta);

struct SmallGainCertificate {
    double M = 1.0;
    double sigma = 0.0;
    double delta = 0.0;
    double lhs = 0.0;
    bool satisfied = false;
    double Mdelta = 1.0;
    double C0 = 0.0;
};

SmallGainCertificate evaluate_certificate(const Matrix& Acl, const Matrix& K, double M,
                                          double sigma, std::size_t N, double delta);

struct MaxDeltaResult {
    double delta_max = 0.0;
    double M = 1.0;
    double sigma = 0.0;
    bool capped = false;  // delta_max limited by D0 rather than the condition
};

inline constexpr std::size_t kSigmaCandidates = 32;

/// Candidate decay rates for the sigma search: log-spaced in (0, |abscissa|).
std::vector<double> sigma_candidates(double abscissa_magnitude);

/// Largest delta in (0, D0) satisfying the small-gain condition, by bisection
/// to 1e-6. With sigma_search the (M, sigma) pair maximizing delta is returned
/// (ties go to the smaller sigma).
MaxDeltaResult max_delta(const Matrix& Acl, const Matrix& K, std::size_t N, double D0,
                         bool sigma_search, const EnvelopeOptions& options = {});

/// Bisection for a fixed (M, sigma).
double max_delta_fixed(const Matrix& Acl, const Matrix& K, double M, double sigma, std::size_t N,
                       double D0, bool* capped = nullptr);

}  // namespace rdpredict
