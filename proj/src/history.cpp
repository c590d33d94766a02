#include "rdpredict/history.hpp"

#include "rdpredict/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rdpredict {

ControlHistory::ControlHistory(std::size_t dimension, double dt, double window)
    : dim_(dimension), dt_(dt), window_(window) {
    if (dimension == 0) throw InvalidArgument("control history: dimension must be >= 1");
    if (!(dt > 0.0)) throw InvalidArgument("control history: dt must be positive");
    if (!(window > 0.0)) throw InvalidArgument("control history: window must be positive");
    capacity_ = static_cast<std::size_t>(std::ceil(window / dt)) + 2;
    data_.assign(capacity_ * dim_, 0.0);
}

void ControlHistory::push(std::span<const double> w) {
    if (w.size() != dim_) throw DimensionError("control history: sample has wrong dimension");
    std::copy(w.begin(), w.end(), data_.begin() + static_cast<std::ptrdiff_t>((count_ % capacity_) * dim_));
    ++count_;
}

void ControlHistory::check_retained(std::size_t k, double s) const {
    if (k >= count_) {
        std::ostringstream os;
        os << "control history queried at s = " << s << " beyond newest sample t = " << t_head();
        throw OutOfWindowError(os.str());
    }
    if (count_ - k > capacity_) {
        std::ostringstream os;
        os << "control history queried at s = " << s << ", older than the retention window ["
           << t_head() - window_ << ", " << t_head() << "]";
        throw OutOfWindowError(os.str());
    }
}

void ControlHistory::at_index(std::ptrdiff_t k, std::span<double> out) const {
    if (out.size() != dim_) throw DimensionError("control history: output has wrong dimension");
    if (k < 0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const auto uk = static_cast<std::size_t>(k);
    check_retained(uk, static_cast<double>(k) * dt_);
    const double* src = slot(uk);
    std::copy(src, src + dim_, out.begin());
}

double ControlHistory::at_index(std::ptrdiff_t k, std::size_t component) const {
    if (k < 0) return 0.0;
    const auto uk = static_cast<std::size_t>(k);
    check_retained(uk, static_cast<double>(k) * dt_);
    return slot(uk)[component];
}

void ControlHistory::lookup(double s, std::span<double> out) const {
    if (out.size() != dim_) throw DimensionError("control history: output has wrong dimension");
    if (s <= 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double pos = s / dt_;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= 1e-9) {
        at_index(static_cast<std::ptrdiff_t>(nearest), out);
        return;
    }
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    check_retained(k, s);
    check_retained(k + 1, s);
    const double* a = slot(k);
    const double* b = slot(k + 1);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = a[i] + frac * (b[i] - a[i]);
}

std::vector<double> ControlHistory::lookup(double s) const {
    std::vector<double> out(dim_);
    lookup(s, out);
    return out;
}

}  // namespace rdpredict
