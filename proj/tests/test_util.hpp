#pragma once

#include <cmath>

#include "genlab/measures.hpp"

namespace genlab::testing {

// Normalized grid density proportional to the 1-D Gaussian N(mu, s^2).
inline ParamMeasure gaussian_on_grid(const GridPtr& grid, double mu, double s) {
    Vec d(grid->size());
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double u = (grid->node(i)[0] - mu) / s;
        d[i] = std::exp(-0.5 * u * u);
        total += d[i] * grid->cell_volume;
    }
    for (double& v : d) v /= total;
    return ParamMeasure::on_grid(grid, d);
}

inline DataPoint scalar_point(double y) { return DataPoint{{}, y}; }

}  // namespace genlab::testing
