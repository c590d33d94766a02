#include "rdpredict/design.hpp"

#include "rdpredict/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace rdpredict {

Truncation select_truncation(std::span<const double> eigenvalues, double margin) {
    if (margin < 0.0) throw InvalidArgument("select_truncation: margin must be >= 0");
    std::size_t n = 0;
    while (n < eigenvalues.size() && eigenvalues[n] >= -margin) ++n;
    n = std::max<std::size_t>(n, 1);
    if (n >= eigenvalues.size()) {
        std::ostringstream os;
        os << "insufficient basis: " << eigenvalues.size()
           << " modes supplied, none beyond the retained ones lies below -" << margin;
        throw InvalidArgument(os.str());
    }
    return {n, -eigenvalues[n]};
}

Matrix ControllerDesign::Lambda() const {
    Matrix l = Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i) l(i, i) = lambdas[i];
    return l;
}

double ControllerDesign::identity_residual() const {
    const Matrix lambda = Lambda();
    const Matrix r = lambda + expm(lambda, -D0) * K - Acl;
    return induced_norm2(r);
}

PolePlacement place_poles(std::span<const double> lambdas, double D0, std::span<const double> poles) {
    if (poles.size() != lambdas.size()) {
        std::ostringstream os;
        os << "place_poles: " << poles.size() << " poles for " << lambdas.size() << " modes";
        throw DimensionError(os.str());
    }
    const auto n = static_cast<Eigen::Index>(lambdas.size());
    PolePlacement out{Matrix::Zero(n, n), Matrix::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(poles[i] < 0.0)) {
            std::ostringstream os;
            os << "invalid design: pole " << poles[i] << " is not in the open left half-plane";
            throw InvalidArgument(os.str());
        }
        out.Acl(i, i) = poles[i];
        out.K(i, i) = std::exp(D0 * lambdas[i]) * (poles[i] - lambdas[i]);
    }
    return out;
}

ControllerDesign make_design(std::span<const double> eigenvalues, double margin, double D0,
                             std::span<const double> poles, double t0) {
    if (!(D0 > 0.0)) throw InvalidArgument("nominal delay D0 must be positive");
    if (!(t0 > 0.0)) throw InvalidArgument("transition time t0 must be positive");
    const Truncation tr = select_truncation(eigenvalues, margin);
    ControllerDesign d;
    d.N = tr.N;
    d.gamma = tr.gamma;
    d.lambdas.assign(eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(tr.N));
    d.D0 = D0;
    d.t0 = t0;
    d.poles.assign(poles.begin(), poles.end());
    auto placed = place_poles(d.lambdas, D0, d.poles);
    d.Acl = std::move(placed.Acl);
    d.K = std::move(placed.K);
    return d;
}

ControllerDesign make_zero_gain_design(std::span<const double> eigenvalues, double margin,
                                       double D0, double t0) {
    const Truncation tr = select_truncation(eigenvalues, margin);
    std::vector<double> poles(eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(tr.N));
    return make_design(eigenvalues, margin, D0, poles, t0);
}

namespace {

// ||e^{Acl t}|| e^{sigma t}, evaluated as one exponential so long horizons do not overflow.
double envelope_ratio(const Matrix& Acl, double sigma, double t) {
    const Matrix shifted = Acl + sigma * Matrix::Identity(Acl.rows(), Acl.cols());
    return induced_norm2(expm(shifted, t));
}

double golden_max(const Matrix& Acl, double sigma, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = envelope_ratio(Acl, sigma, c);
    double fd = envelope_ratio(Acl, sigma, d);
    for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, b); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = envelope_ratio(Acl, sigma, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = envelope_ratio(Acl, sigma, d);
        }
    }
    return std::max(fc, fd);
}

}  // namespace

DecayEnvelope decay_envelope(const Matrix& Acl, const EnvelopeOptions& options) {
    if (Acl.rows() == 0 || Acl.rows() != Acl.cols()) throw DimensionError("decay_envelope: Acl must be square");
    const double abscissa = spectral_abscissa(Acl);
    if (!(abscissa < 0.0)) {
        std::ostringstream os;
        os << "invalid design: Acl is not Hurwitz (spectral abscissa " << abscissa << ")";
        throw InvalidArgument(os.str());
    }
    if (options.samples < 2) throw InvalidArgument("decay_envelope: need at least 2 samples");
    const double rate = -abscissa;
    const double sigma = options.sigma.value_or(options.sigma_fraction * rate);
    if (!(sigma > 0.0) || !(sigma < rate)) {
        std::ostringstream os;
        os << "decay_envelope: sigma " << sigma << " must lie in (0, " << rate << ")";
        throw InvalidArgument(os.str());
    }
    const double gap = rate - sigma;

    // Beyond (n-1)/gap the shifted tail bound e^{-gap t} P(t) is decreasing, so once it
    // drops below 1 (<= M) no later time can raise the envelope constant.
    const ExpNormBound bound(Acl + sigma * Matrix::Identity(Acl.rows(), Acl.cols()));
    double horizon = 10.0 / rate;
    if (bound.order() > 1 && bound.nilpotent_norm() > 0.0) {
        double t = std::max(static_cast<double>(bound.order() - 1) / gap, 1.0 / rate);
        while (bound(t) >= 1.0) t *= 1.25;
        horizon = std::max(horizon, t);
    }

    const std::size_t n = options.samples;
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = horizon * static_cast<double>(i) / static_cast<double>(n - 1);
        values[i] = envelope_ratio(Acl, sigma, t);
    }
    double best = *std::max_element(values.begin(), values.end());
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (values[i] >= values[i - 1] && values[i] >= values[i + 1] && values[i] > 1.0) {
            const double dt = horizon / static_cast<double>(n - 1);
            const double ti = dt * static_cast<double>(i);
            best = std::max(best, golden_max(Acl, sigma, ti - dt, ti + dt));
        }
    }
    return {std::max(1.0, best), sigma, horizon};
}

double gain_constant(const Matrix& K) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < K.rows(); ++k) sum += K.row(k).norm();
    return std::sqrt(static_cast<double>(K.rows())) * sum;
}

double small_gain_lhs(const Matrix& Acl, const Matrix& K, double M, double sigma, std::size_t N,
                      double delta) {
    if (delta < 0.0) throw InvalidArgument("small_gain_lhs: delta must be >= 0");
    if (!(sigma > 0.0)) throw InvalidArgument("small_gain_lhs: sigma must be positive");
    if (!(M >= 1.0)) throw InvalidArgument("small_gain_lhs: M must be >= 1");
    const double growth = std::exp(induced_norm2(Acl) * delta);
    double row_sum = 0.0;
    for (Eigen::Index k = 0; k < K.rows(); ++k) row_sum += K.row(k).norm();
    const double bracket = (growth - 1.0) + sigma * delta * std::exp(sigma * delta);
    return std::max(M, growth) * std::sqrt(static_cast<double>(N)) / sigma * row_sum * bracket;
}

SmallGainCertificate evaluate_certificate(const Matrix& Acl, const Matrix& K, double M,
                                          double sigma, std::size_t N, double delta) {
    SmallGainCertificate c;
    c.M = M;
    c.sigma = sigma;
    c.delta = delta;
    c.lhs = small_gain_lhs(Acl, K, M, sigma, N, delta);
    c.satisfied = c.lhs < 1.0;
    c.Mdelta = std::max(M, std::exp(induced_norm2(Acl) * delta));
    c.C0 = gain_constant(K);
    return c;
}

double max_delta_fixed(const Matrix& Acl, const Matrix& K, double M, double sigma, std::size_t N,
                       double D0, bool* capped) {
    constexpr double kFloor = 1e-9;
    constexpr double kTol = 1e-6;
    const double cap = D0 - 1e-6;
    if (small_gain_lhs(Acl, K, M, sigma, N, kFloor) >= 1.0) {
        throw NumericalError("max_delta: small-gain condition fails at delta = 1e-9 (degenerate inputs)");
    }
    if (capped) *capped = false;
    if (small_gain_lhs(Acl, K, M, sigma, N, cap) < 1.0) {
        if (capped) *capped = true;
        return cap;
    }
    double lo = kFloor;
    double hi = cap;
    while (hi - lo > kTol) {
        const double mid = 0.5 * (lo + hi);
        if (small_gain_lhs(Acl, K, M, sigma, N, mid) < 1.0) lo = mid;
        else hi = mid;
    }
    return lo;
}

std::vector<double> sigma_candidates(double abscissa_magnitude) {
    const double top = 0.999 * abscissa_magnitude;
    const double bottom = 1e-3 * top;
    std::vector<double> out(kSigmaCandidates);
    for (std::size_t i = 0; i < kSigmaCandidates; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(kSigmaCandidates - 1);
        out[i] = bottom * std::pow(top / bottom, frac);
    }
    return out;
}

MaxDeltaResult max_delta(const Matrix& Acl, const Matrix& K, std::size_t N, double D0,
                         bool sigma_search, const EnvelopeOptions& options) {
    if (!(D0 > 0.0)) throw InvalidArgument("max_delta: D0 must be positive");
    const double abscissa = spectral_abscissa(Acl);
    if (!(abscissa < 0.0)) throw InvalidArgument("invalid design: Acl is not Hurwitz");

    auto solve_for = [&](std::optional<double> sigma) {
        EnvelopeOptions opt = options;
        opt.sigma = sigma;
        const DecayEnvelope env = decay_envelope(Acl, opt);
        MaxDeltaResult r;
        r.M = env.M;
        r.sigma = env.sigma;
        r.delta_max = max_delta_fixed(Acl, K, env.M, env.sigma, N, D0, &r.capped);
        return r;
    };

    if (!sigma_search) return solve_for(options.sigma);

    const auto sigmas = sigma_candidates(-abscissa);
    std::vector<std::future<MaxDeltaResult>> jobs;
    jobs.reserve(sigmas.size());
    for (double s : sigmas) jobs.push_back(std::async(std::launch::async, solve_for, s));
    MaxDeltaResult best;
    bool have = false;
    for (auto& job : jobs) {
        const MaxDeltaResult r = job.get();
        if (!have || r.delta_max > best.delta_max) {
            best = r;
            have = true;
        }
    }
    return best;
}

}  // namespace rdpredict
