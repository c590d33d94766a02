#include "rdpredict/spectral.hpp"

#include "rdpredict/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace rdpredict {

Coefficient::Coefficient(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

void SturmLiouvilleProblem::validate(const Grid& grid) const {
    for (double x : grid.nodes) {
        if (!(rho(x) > 0.0)) {
            std::ostringstream os;
            os << "rho must be positive, rho(" << x << ") = " << rho(x);
            throw InvalidArgument(os.str());
        }
        if (!(p(x) > 0.0)) {
            std::ostringstream os;
            os << "p must be positive, p(" << x << ") = " << p(x);
            throw InvalidArgument(os.str());
        }
    }
}

double SpectralBasis::inner(std::span<const double> f, std::span<const double> g) const {
    const std::size_t n = grid.size();
    if (f.size() != n || g.size() != n) {
        throw DimensionError("inner product: samples do not match the basis grid");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += grid.weights[i] * rho[i] * f[i] * g[i];
    return acc;
}

double SpectralBasis::norm(std::span<const double> f) const { return std::sqrt(inner(f, f)); }

std::size_t count_sign_changes(std::span<const double> values) {
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, std::abs(v));
    const double floor = 1e-10 * peak;
    std::size_t changes = 0;
    int last = 0;
    for (double v : values) {
        if (std::abs(v) <= floor) continue;
        int s = v > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

namespace {

// State is (y, p y').
using State = std::array<double, 2>;

struct ShootResult {
    State end{};
    std::vector<double> y;
    std::vector<double> dy;
};

class Shooter {
public:
    Shooter(const SturmLiouvilleProblem& problem, const Grid& grid, const EigenSolverOptions& opt)
        : pb_(problem), grid_(grid), opt_(opt) {}

    ShootResult shoot(double lambda, bool keep_samples) const {
        ShootResult out;
        State s{std::sin(pb_.theta1), pb_.p(0.0) * std::cos(pb_.theta1)};
        if (keep_samples) {
            out.y.reserve(grid_.size());
            out.dy.reserve(grid_.size());
            out.y.push_back(s[0]);
            out.dy.push_back(s[1] / pb_.p(0.0));
        }
        double h = grid_.spacing();
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            h = advance(lambda, grid_.nodes[i - 1], grid_.nodes[i], s, h);
            if (keep_samples) {
                out.y.push_back(s[0]);
                out.dy.push_back(s[1] / pb_.p(grid_.nodes[i]));
            }
        }
        out.end = s;
        return out;
    }

    double characteristic(double lambda) const {
        const State s = shoot(lambda, false).end;
        return std::cos(pb_.theta2) * s[0] + std::sin(pb_.theta2) * s[1] / pb_.p(1.0);
    }

private:
    State rhs(double lambda, double x, const State& s) const {
        return {s[1] / pb_.p(x), (lambda * pb_.rho(x) - pb_.q(x)) * s[0]};
    }

    // Dormand-Prince 5(4) from a to b; returns the last accepted step size.
    double advance(double lambda, double a, double b, State& s, double h) const {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        double x = a;
        h = std::min(h, b - a);
        double last_ok = h;
        while (x < b) {
            bool final_step = false;
            if (x + h >= b) {
                h = b - x;
                final_step = true;
            }
            const State k1 = rhs(lambda, x, s);
            auto stage = [&](std::initializer_list<std::pair<double, const State*>> terms) {
                State t = s;
                for (const auto& [coef, k] : terms) {
                    t[0] += h * coef * (*k)[0];
                    t[1] += h * coef * (*k)[1];
                }
                return t;
            };
            const State k2 = rhs(lambda, x + c2 * h, stage({{a21, &k1}}));
            const State k3 = rhs(lambda, x + c3 * h, stage({{a31, &k1}, {a32, &k2}}));
            const State k4 = rhs(lambda, x + c4 * h, stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const State k5 =
                rhs(lambda, x + c5 * h, stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const State k6 = rhs(lambda, x + h,
                                 stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            const State next = stage({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            const State k7 = rhs(lambda, x + h, next);

            double err = 0.0;
            for (int j = 0; j < 2; ++j) {
                const double ej = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] +
                                       e6 * k6[j] + e7 * k7[j]);
                const double scale =
                    opt_.abs_tol + opt_.rel_tol * std::max(std::abs(s[j]), std::abs(next[j]));
                err = std::max(err, std::abs(ej) / scale);
            }
            if (err <= 1.0) {
                s = next;
                last_ok = h;
                x = final_step ? b : x + h;
                const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
                h *= grow;
            } else {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
                if (h < 1e-14) throw NumericalError("shooting integrator step underflow");
            }
        }
        return last_ok;
    }

    const SturmLiouvilleProblem& pb_;
    const Grid& grid_;
    const EigenSolverOptions& opt_;
};

struct Root {
    double lambda;
    std::size_t index;
};

class SpectrumSearch {
public:
    SpectrumSearch(const Shooter& shooter, const Grid& grid, double tol, const EigenSolverOptions& opt)
        : shooter_(shooter), grid_(grid), tol_(tol), opt_(opt) {}

    // Scan [lo, hi] downward in steps of `step`; bisect every sign change.
    void scan(double lo, double hi, double step) {
        double upper = hi;
        double f_upper = eval(upper);
        while (upper > lo) {
            const double lower = std::max(lo, upper - step);
            const double f_lower = eval(lower);
            if (std::signbit(f_lower) != std::signbit(f_upper) || f_lower == 0.0) add(bisect(lower, upper, f_lower));
            upper = lower;
            f_upper = f_lower;
        }
    }

    // Downward scan from `start` until a root with index >= target is found.
    double scan_until(double start, std::size_t target) {
        double upper = start;
        double f_upper = eval(upper);
        for (std::size_t step = 0; step < opt_.max_scan_steps; ++step) {
            const double lower = upper - opt_.scan_step;
            const double f_lower = eval(lower);
            if (std::signbit(f_lower) != std::signbit(f_upper) || f_lower == 0.0) {
                const Root r = add(bisect(lower, upper, f_lower));
                if (r.index >= target) return lower;
            }
            upper = lower;
            f_upper = f_lower;
        }
        std::ostringstream os;
        os << "eigenvalue search exhausted: scanned lambda in [" << upper << ", " << start
           << "] without locating mode " << target + 1;
        throw BracketingError(os.str(), upper, start);
    }

    // Refine every gap in the oscillation indices found so far.
    void fill_gaps(double start, double step) {
        for (;;) {
            bool refined = false;
            double prev_lambda = start;
            std::size_t expected = 0;
            for (const auto& [index, lambda] : roots_) {
                if (index != expected) {
                    if (step < opt_.min_refine_step) {
                        std::ostringstream os;
                        os << "missing eigenvalue with oscillation index " << expected
                           << " in lambda interval [" << lambda << ", " << prev_lambda << "]";
                        throw BracketingError(os.str(), lambda, prev_lambda);
                    }
                    scan(lambda + 0.5 * tol_, prev_lambda, step);
                    refined = true;
                    break;
                }
                prev_lambda = lambda;
                expected = index + 1;
            }
            if (!refined) return;
            step /= 8.0;
        }
    }

    bool has_prefix(std::size_t n) const {
        std::size_t expected = 0;
        for (const auto& [index, lambda] : roots_) {
            if (index != expected) return false;
            if (++expected == n) return true;
        }
        return expected >= n;
    }

    const std::map<std::size_t, double>& roots() const { return roots_; }
    std::size_t lowest_index() const { return roots_.empty() ? 0 : roots_.begin()->first; }

private:
    double eval(double lambda) const { return shooter_.characteristic(lambda); }

    double bisect(double lo, double hi, double f_lo) const {
        if (f_lo == 0.0) return lo;
        while (hi - lo > tol_) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = eval(mid);
            if (f_mid == 0.0) return mid;
            if (std::signbit(f_mid) == std::signbit(f_lo)) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    Root add(double lambda) {
        const auto samples = shooter_.shoot(lambda, true);
        const std::size_t index = count_sign_changes(samples.y);
        roots_.emplace(index, lambda);
        return {lambda, index};
    }

    const Shooter& shooter_;
    const Grid& grid_;
    double tol_;
    const EigenSolverOptions& opt_;
    std::map<std::size_t, double> roots_;
};

}  // namespace

double characteristic_function(const SturmLiouvilleProblem& problem, double lambda,
                               const Grid& grid, const EigenSolverOptions& options) {
    return Shooter(problem, grid, options).characteristic(lambda);
}

SpectralBasis solve_eigensystem(const SturmLiouvilleProblem& problem, std::size_t n_modes,
                                const Grid& grid, double tol, const EigenSolverOptions& options) {
    if (n_modes == 0) throw InvalidArgument("solve_eigensystem: n_modes must be >= 1");
    if (!(tol > 0.0)) throw InvalidArgument("solve_eigensystem: tol must be positive");
    problem.validate(grid);

    double start = -std::numeric_limits<double>::infinity();
    for (double x : grid.nodes) start = std::max(start, problem.q(x) / problem.rho(x));
    start += 1.0;

    const Shooter shooter(problem, grid, options);
    SpectrumSearch search(shooter, grid, tol, options);
    search.scan_until(start, n_modes - 1);
    search.fill_gaps(start, options.scan_step / 8.0);

    // Robin conditions can push the top of the spectrum above max(q/rho).
    double span = options.scan_step * 4.0;
    for (int attempt = 0; search.lowest_index() != 0 && attempt < 40; ++attempt) {
        search.scan(start, start + span, options.scan_step);
        start += span;
        span *= 2.0;
        search.fill_gaps(start, options.scan_step / 8.0);
    }
    if (!search.has_prefix(n_modes)) {
        std::ostringstream os;
        os << "eigenvalue search could not confirm oscillation indices 0.." << n_modes - 1
           << " below lambda = " << start;
        throw BracketingError(os.str(), search.roots().rbegin()->second, start);
    }

    SpectralBasis basis;
    basis.grid = grid;
    basis.rho.reserve(grid.size());
    for (double x : grid.nodes) basis.rho.push_back(problem.rho(x));

    for (const auto& [index, lambda] : search.roots()) {
        if (index >= n_modes) break;
        auto samples = shooter.shoot(lambda, true);
        basis.eigenvalues.push_back(lambda);
        basis.eigenfunctions.push_back(std::move(samples.y));
        basis.derivatives.push_back(std::move(samples.dy));
    }

    // Modified Gram-Schmidt in the discrete weighted inner product, so that
    // projection and synthesis are exact inverses on the grid.
    const double threshold_rel = 1e-10;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        auto& ek = basis.eigenfunctions[k];
        auto& dk = basis.derivatives[k];
        for (std::size_t j = 0; j < k; ++j) {
            const double c = basis.inner(ek, basis.eigenfunctions[j]);
            for (std::size_t i = 0; i < ek.size(); ++i) {
                ek[i] -= c * basis.eigenfunctions[j][i];
                dk[i] -= c * basis.derivatives[j][i];
            }
        }
        double scale = 1.0 / basis.norm(ek);
        double peak = 0.0;
        for (double v : ek) peak = std::max(peak, std::abs(v));
        for (double v : ek) {
            if (std::abs(v) > threshold_rel * peak) {
                if (v < 0.0) scale = -scale;
                break;
            }
        }
        for (std::size_t i = 0; i < ek.size(); ++i) {
            ek[i] *= scale;
            dk[i] *= scale;
        }
    }
    return basis;
}

std::vector<double> project(std::span<const double> f, const SpectralBasis& basis, std::size_t n) {
    if (f.size() != basis.grid.size()) {
        throw DimensionError("project: function has " + std::to_string(f.size()) +
                             " samples, basis grid has " + std::to_string(basis.grid.size()));
    }
    if (n > basis.size()) {
        throw DimensionError("project: requested " + std::to_string(n) + " modes, basis has " +
                             std::to_string(basis.size()));
    }
    std::vector<double> coeffs(n);
    for (std::size_t k = 0; k < n; ++k) coeffs[k] = basis.inner(f, basis.eigenfunctions[k]);
    return coeffs;
}

std::vector<double> synthesize(std::span<const double> coeffs, const SpectralBasis& basis) {
    if (coeffs.size() > basis.size()) {
        throw DimensionError("synthesize: " + std::to_string(coeffs.size()) +
                             " coefficients exceed basis size " + std::to_string(basis.size()));
    }
    std::vector<double> f(basis.grid.size(), 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const auto& ek = basis.eigenfunctions[k];
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += coeffs[k] * ek[i];
    }
    return f;
}

}  // namespace rdpredict
