#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rdpredict {

/// Ring buffer of control vectors w sampled every `dt` starting at t = 0.
///
/// Lookups at s <= 0 return zero (the plant is uncontrolled for negative
/// times). Inside (0, t_head] values are linearly interpolated and exact at
/// sample instants. Queries older than the retention window throw
/// OutOfWindowError.
class ControlHistory {
public:
    ControlHistory(std::size_t dimension, double dt, double window);

    std::size_t dimension() const noexcept { return dim_; }
    double dt() const noexcept { return dt_; }
    double window() const noexcept { return window_; }
    bool empty() const noexcept { return count_ == 0; }
    /// Number of samples ever appended; the newest has index count() - 1.
    std::size_t count() const noexcept { return count_; }
    double t_head() const noexcept { return count_ == 0 ? 0.0 : static_cast<double>(count_ - 1) * dt_; }

    /// Appends the sample for time count() * dt.
    void push(std::span<const double> w);

    /// Sample k (time k * dt); zero for k < 0.
    void at_index(std::ptrdiff_t k, std::span<double> out) const;
    double at_index(std::ptrdiff_t k, std::size_t component) const;

    void lookup(double s, std::span<double> out) const;
    std::vector<double> lookup(double s) const;

private:
    const double* slot(std::size_t k) const { return &data_[(k % capacity_) * dim_]; }
    void check_retained(std::size_t k, double s) const;

    std::size_t dim_;
    double dt_;
    double window_;
    std::size_t capacity_;
    std::size_t count_ = 0;
    std::vector<double> data_;
};

}  // namespace rdpredict
