#pragma once

#include <vector>

#include "otlab/ot.hpp"

namespace otlab::detail {

struct SimplexResult {
    std::vector<PlanArc> plan;
    double cost = 0.0;
    std::vector<double> u; // source potentials (lambda side)
    std::vector<double> v; // sink potentials (mu side)
};

// Transportation simplex on the complete bipartite graph.  Supplies and
// demands must balance exactly (caller rescales).
SimplexResult transport_simplex(int dim, std::size_t n, const double* xs,
                                const double* a, std::size_t m, const double* ys,
                                const double* b, const CostConvention& conv);

} // namespace otlab::detail
