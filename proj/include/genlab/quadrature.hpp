#pragma once

#include <vector>

namespace genlab {

// Gauss-Legendre rule on [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_legendre01(int count);

}  // namespace genlab
