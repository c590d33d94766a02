#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace rdpredict {

enum class DelayKind { constant, uniform_sinusoid, paper_example, custom_sampled };

std::string_view to_string(DelayKind kind);
DelayKind delay_kind_from_string(std::string_view name);

/// Rectangular (t, xi) lattice of delay values, bilinearly interpolated.
/// Times outside the tabulated range are clamped to the nearest edge.
struct SampledDelay {
    std::vector<double> times;   // strictly increasing
    std::vector<double> xis;     // strictly increasing, covering [0, 1]
    std::vector<double> values;  // row-major: values[it * xis.size() + ix]

    double operator()(double t, double xi) const;
};

/// Reads "t,xi,D" rows (header required) forming a full rectangular lattice.
SampledDelay load_sampled_delay(const std::filesystem::path& path);

/// Time- and spatially-varying input delay D(t, xi) around a nominal D0.
///
/// Families:
///   constant          D = D0
///   uniform_sinusoid  D = D0 + amplitude sin(omega t + phase)
///   paper_example     D = D0 - a + a |2 xi - 1| (1 + sin((3/2 + xi) t + 11 xi - 3))
///   custom_sampled    bilinear interpolation of a tabulated lattice
class DelayField {
public:
    static DelayField constant(double D0);
    static DelayField uniform_sinusoid(double D0, double amplitude, double omega, double phase = 0.0);
    static DelayField paper_example(double D0 = 1.0, double amplitude = 0.23);
    static DelayField custom_sampled(double D0, SampledDelay table);

    DelayKind kind() const noexcept { return kind_; }
    double D0() const noexcept { return D0_; }
    double amplitude() const noexcept { return amplitude_; }
    double omega() const noexcept { return omega_; }
    double phase() const noexcept { return phase_; }
    const SampledDelay* table() const noexcept { return table_.get(); }

    /// Deviation bound the field is claimed to respect (defaults to the
    /// family's analytic bound).
    double delta_claimed() const noexcept { return delta_claimed_; }
    void set_delta_claimed(double delta) { delta_claimed_ = delta; }

    /// Unchecked evaluation for hot loops; callers guarantee t >= 0, xi in [0, 1].
    double operator()(double t, double xi) const noexcept;

private:
    DelayKind kind_ = DelayKind::constant;
    double D0_ = 1.0;
    double amplitude_ = 0.0;
    double omega_ = 0.0;
    double phase_ = 0.0;
    double delta_claimed_ = 0.0;
    std::shared_ptr<const SampledDelay> table_;
};

/// Checked evaluation: DomainError for xi outside [0, 1] or t < 0.
double evaluate_delay(const DelayField& field, double t, double xi);

struct DeviationReport {
    double max_deviation = 0.0;  // max |D - D0| on the lattice
    double min_delay = 0.0;
    double max_delay = 0.0;
    bool pass = false;           // max_deviation <= delta_claimed
    bool positive = false;       // min_delay > 0
    bool monotone = true;        // t - D(t, xi) non-decreasing along every xi
};

/// Scans a uniform lattice over [0, t_end] x [0, 1]; both resolutions >= 64.
DeviationReport validate_deviation(const DelayField& field, std::size_t n_xi = 101,
                                   std::size_t n_t = 1001, double t_end = 40.0);

}  // namespace rdpredict
