#include "rdpredict/delay.hpp"

#include "rdpredict/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rdpredict {

std::string_view to_string(DelayKind kind) {
    switch (kind) {
        case DelayKind::constant: return "constant";
        case DelayKind::uniform_sinusoid: return "uniform_sinusoid";
        case DelayKind::paper_example: return "paper_example";
        case DelayKind::custom_sampled: return "custom_sampled";
    }
    return "constant";
}

DelayKind delay_kind_from_string(std::string_view name) {
    if (name == "constant") return DelayKind::constant;
    if (name == "uniform_sinusoid") return DelayKind::uniform_sinusoid;
    if (name == "paper_example") return DelayKind::paper_example;
    if (name == "custom_sampled") return DelayKind::custom_sampled;
    throw InvalidArgument("unknown delay kind '" + std::string(name) + "'");
}

namespace {

// Index i with axis[i] <= x <= axis[i+1] and the interpolation fraction.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x) {
    if (axis.size() == 1 || x <= axis.front()) return {0, 0.0};
    if (x >= axis.back()) return {axis.size() - 2, 1.0};
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - axis.begin()) - 1;
    return {i, (x - axis[i]) / (axis[i + 1] - axis[i])};
}

}  // namespace

double SampledDelay::operator()(double t, double xi) const {
    const std::size_t nx = xis.size();
    if (times.size() == 1) {
        const auto [ix, fx] = locate(xis, xi);
        if (nx == 1) return values[0];
        return (1.0 - fx) * values[ix] + fx * values[ix + 1];
    }
    const auto [it, ft] = locate(times, t);
    if (nx == 1) return (1.0 - ft) * values[it] + ft * values[it + 1];
    const auto [ix, fx] = locate(xis, xi);
    const double v00 = values[it * nx + ix];
    const double v01 = values[it * nx + ix + 1];
    const double v10 = values[(it + 1) * nx + ix];
    const double v11 = values[(it + 1) * nx + ix + 1];
    return (1.0 - ft) * ((1.0 - fx) * v00 + fx * v01) + ft * ((1.0 - fx) * v10 + fx * v11);
}

SampledDelay load_sampled_delay(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open delay table '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("delay table '" + path.string() + "' is empty");
    std::map<double, std::map<double, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t = 0.0, xi = 0.0, d = 0.0;
        if (!(ls >> t >> xi >> d)) {
            throw InvalidArgument("delay table '" + path.string() + "': malformed row " +
                                  std::to_string(line_no));
        }
        rows[t][xi] = d;
    }
    if (rows.empty()) throw InvalidArgument("delay table '" + path.string() + "' has no rows");
    SampledDelay table;
    for (const auto& [xi, d] : rows.begin()->second) table.xis.push_back(xi);
    for (const auto& [t, row] : rows) {
        if (row.size() != table.xis.size()) {
            throw InvalidArgument("delay table '" + path.string() + "' is not a rectangular lattice");
        }
        table.times.push_back(t);
        std::size_t k = 0;
        for (const auto& [xi, d] : row) {
            if (xi != table.xis[k++]) {
                throw InvalidArgument("delay table '" + path.string() + "' is not a rectangular lattice");
            }
            table.values.push_back(d);
        }
    }
    if (table.xis.front() > 0.0 || table.xis.back() < 1.0) {
        throw InvalidArgument("delay table '" + path.string() + "' must cover xi in [0, 1]");
    }
    return table;
}

DelayField DelayField::constant(double D0) {
    if (!(D0 > 0.0)) throw InvalidArgument("delay: D0 must be positive");
    DelayField f;
    f.kind_ = DelayKind::constant;
    f.D0_ = D0;
    return f;
}

DelayField DelayField::uniform_sinusoid(double D0, double amplitude, double omega, double phase) {
    DelayField f = constant(D0);
    f.kind_ = DelayKind::uniform_sinusoid;
    f.amplitude_ = amplitude;
    f.omega_ = omega;
    f.phase_ = phase;
    f.delta_claimed_ = std::abs(amplitude);
    return f;
}

DelayField DelayField::paper_example(double D0, double amplitude) {
    if (amplitude < 0.0) throw InvalidArgument("delay: amplitude must be >= 0");
    DelayField f = constant(D0);
    f.kind_ = DelayKind::paper_example;
    f.amplitude_ = amplitude;
    f.delta_claimed_ = amplitude;
    return f;
}

DelayField DelayField::custom_sampled(double D0, SampledDelay table) {
    if (table.times.empty() || table.xis.empty() ||
        table.values.size() != table.times.size() * table.xis.size()) {
        throw InvalidArgument("delay: sampled table has inconsistent dimensions");
    }
    DelayField f = constant(D0);
    f.kind_ = DelayKind::custom_sampled;
    double dev = 0.0;
    for (double v : table.values) dev = std::max(dev, std::abs(v - D0));
    f.delta_claimed_ = dev;
    f.table_ = std::make_shared<const SampledDelay>(std::move(table));
    return f;
}

double DelayField::operator()(double t, double xi) const noexcept {
    switch (kind_) {
        case DelayKind::constant: return D0_;
        case DelayKind::uniform_sinusoid: return D0_ + amplitude_ * std::sin(omega_ * t + phase_);
        case DelayKind::paper_example:
            return D0_ - amplitude_ +
                   amplitude_ * std::abs(2.0 * xi - 1.0) *
                       (1.0 + std::sin((1.5 + xi) * t + (11.0 * xi - 3.0)));
        case DelayKind::custom_sampled: return (*table_)(t, xi);
    }
    return D0_;
}

double evaluate_delay(const DelayField& field, double t, double xi) {
    if (!(xi >= 0.0 && xi <= 1.0)) {
        std::ostringstream os;
        os << "delay evaluated at xi = " << xi << " outside [0, 1]";
        throw DomainError(os.str());
    }
    if (!(t >= 0.0)) {
        std::ostringstream os;
        os << "delay evaluated at negative time t = " << t;
        throw DomainError(os.str());
    }
    return field(t, xi);
}

DeviationReport validate_deviation(const DelayField& field, std::size_t n_xi, std::size_t n_t,
                                   double t_end) {
    if (n_xi < 64 || n_t < 64) throw InvalidArgument("validate_deviation: lattice resolution must be >= 64");
    if (!(t_end > 0.0)) throw InvalidArgument("validate_deviation: t_end must be positive");
    DeviationReport r;
    r.min_delay = std::numeric_limits<double>::infinity();
    r.max_delay = -std::numeric_limits<double>::infinity();
    for (std::size_t ix = 0; ix < n_xi; ++ix) {
        const double xi = static_cast<double>(ix) / static_cast<double>(n_xi - 1);
        double prev_arrival = -std::numeric_limits<double>::infinity();
        for (std::size_t it = 0; it < n_t; ++it) {
            const double t = t_end * static_cast<double>(it) / static_cast<double>(n_t - 1);
            const double d = field(t, xi);
            r.min_delay = std::min(r.min_delay, d);
            r.max_delay = std::max(r.max_delay, d);
            r.max_deviation = std::max(r.max_deviation, std::abs(d - field.D0()));
            const double arrival = t - d;
            if (arrival < prev_arrival) r.monotone = false;
            prev_arrival = arrival;
        }
    }
    // Lattice noise on an exact bound must not flip the verdict.
    r.pass = r.max_deviation <= field.delta_claimed() + 1e-12;
    r.positive = r.min_delay > 0.0;
    return r;
}

}  // namespace rdpredict
