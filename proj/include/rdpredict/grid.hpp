#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rdpredict {

/// Uniform nodes on [0, 1] with composite Simpson weights.
struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
    double spacing() const noexcept { return nodes.size() > 1 ? nodes[1] - nodes[0] : 0.0; }

    /// Unweighted quadrature of sampled values.
    double integrate(std::span<const double> values) const;
};

/// `n_nodes` must be odd and at least 3.
Grid make_simpson_grid(std::size_t n_nodes = 201);

}  // namespace rdpredict
