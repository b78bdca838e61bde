#pragma once

#include <utility>
#include <vector>

namespace jumpact {

// Gauss-Legendre rule on [-1,1], computed once per node count by Newton
// iteration on the Legendre recurrence (accurate to ~1e-15).
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int n);

// Nodes/weights mapped onto [a, b].
GaussLegendre mapped_rule(int n, double a, double b);

}  // namespace jumpact
