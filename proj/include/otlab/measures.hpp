#pragma once

#include <utility>
#include <vector>

#include "otlab/discrete.hpp"
#include "otlab/grid.hpp"
#include "otlab/kernel.hpp"
#include "otlab/rng.hpp"

namespace otlab {

// Convolution with a discretized, renormalized kernel.  The output grid is
// enlarged by the kernel support so no mass leaks; total mass is preserved
// exactly up to floating point summation.
GridMeasure convolve(const GridMeasure& m, const Kernel& k,
                     std::size_t cell_budget = GridSpec::kDefaultCellBudget);

struct GridTranslation {
    GridMeasure measure;
    std::vector<double> residual; // z minus the snapped grid offset
};

// Grid translation snapped to the lattice; weights are moved bit-identically.
GridTranslation translate(const GridMeasure& m, const std::vector<double>& z);
DiscreteMeasure translate(const DiscreteMeasure& m, const std::vector<double>& z);

enum class ProjectionMode {
    Scalar, // pushforward of x -> <x,e>
    Perp,   // n=2 only: pushforward of x -> <x, e_perp>, e_perp = (-e_y, e_x)
};

// 1D pushforward along (or orthogonal to) a unit direction e.
DiscreteMeasure project(const GridMeasure& m, const std::vector<double>& e,
                        ProjectionMode mode = ProjectionMode::Scalar);
DiscreteMeasure project(const DiscreteMeasure& m, const std::vector<double>& e,
                        ProjectionMode mode = ProjectionMode::Scalar);

// Exact Euclidean distance d(x, boundary of X) per mask cell, computed from a
// squared distance transform to the complement (cells beyond the grid count
// as outside).  Values are clamped from below at h/2; cells outside the mask
// hold 0.
ScalarField distance_transform(const Mask& mask);

// I_alpha(X) = integral over X of d(x, bdry X)^(-alpha), midpoint rule.
double erosion_integral(const Mask& mask, double alpha);

struct DominanceResult {
    bool dominated = false;  // true iff b is stochastically >= a
    double max_violation = 0.0;
};

// CDF ordering of 1D measures: b dominates a iff CDF_b <= CDF_a everywhere.
DominanceResult stochastic_dominance_1d(const DiscreteMeasure& a,
                                        const DiscreteMeasure& b);

// max over a family of K generated 1-Lipschitz e-monotone test functions of
// integral(phi d lambda) - integral(phi d mu).  The family always contains
// phi(x) = <x,e>.
double monotone_gap(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                    const std::vector<double>& e, int family_size, Rng rng);

} // namespace otlab
