#include "rdpredict/grid.hpp"

#include "rdpredict/errors.hpp"

#include <string>

namespace rdpredict {

double Grid::integrate(std::span<const double> values) const {
    if (values.size() != weights.size()) {
        throw DimensionError("grid quadrature: expected " + std::to_string(weights.size()) +
                             " samples, got " + std::to_string(values.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
    return acc;
}

Grid make_simpson_grid(std::size_t n_nodes) {
    if (n_nodes < 3 || n_nodes % 2 == 0) {
        throw InvalidArgument("Simpson grid needs an odd node count >= 3, got " +
                              std::to_string(n_nodes));
    }
    Grid g;
    g.nodes.resize(n_nodes);
    g.weights.resize(n_nodes);
    const std::size_t last = n_nodes - 1;
    const double h = 1.0 / static_cast<double>(last);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        g.nodes[i] = static_cast<double>(i) * h;
        double w = (i == 0 || i == last) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        g.weights[i] = w * h / 3.0;
    }
    g.nodes[last] = 1.0;
    return g;
}

}  // namespace rdpredict
