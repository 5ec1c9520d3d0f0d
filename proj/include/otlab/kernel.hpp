#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "otlab/grid.hpp"

namespace otlab {

enum class KernelProfile {
    UniformBall, // density 1/|B_1| on the unit ball
    Tent,        // density proportional to (1-|x|)_+
    Gauss,       // heat kernel, rho_eps = p_{sqrt(eps)}, p_t ~ exp(-|x|^2/(4t))
};

struct Kernel {
    KernelProfile profile = KernelProfile::UniformBall;
    double eps = 0.1;

    // radius beyond which the (possibly truncated) profile vanishes
    double support_radius() const;
    // heat-flow time parameter: t = sqrt(eps) for Gauss, unused otherwise
    double heat_time() const;
    // unnormalized density of rho_eps at distance r from the origin
    double density(double r, int dim) const;

    std::string name() const;
};

Kernel parse_kernel(const std::string& name, double eps);

// Kernel sampled at lattice offsets k*h, |k*h| <= support radius, renormalized
// to unit total weight.  Offsets stored flat (dim entries per node).
struct DiscretizedKernel {
    int dim = 1;
    double h = 1.0;
    int radius_cells = 0;
    std::vector<int> offsets;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

// Throws "kernel-under-resolved" when eps < h.
DiscretizedKernel discretize(const Kernel& k, int dim, double h);

} // namespace otlab
