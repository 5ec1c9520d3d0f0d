#include "otlab/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace otlab {

double Kernel::heat_time() const { return std::sqrt(eps); }

double Kernel::support_radius() const {
    switch (profile) {
        case KernelProfile::UniformBall:
        case KernelProfile::Tent:
            return eps;
        case KernelProfile::Gauss:
            // per-axis std is sqrt(2t); truncate at 8 std
            return 8.0 * std::sqrt(2.0 * heat_time());
    }
    return eps;
}

double Kernel::density(double r, int /*dim*/) const {
    switch (profile) {
        case KernelProfile::UniformBall:
            return r <= eps ? 1.0 : 0.0;
        case KernelProfile::Tent:
            return r <= eps ? 1.0 - r / eps : 0.0;
        case KernelProfile::Gauss: {
            double t = heat_time();
            return std::exp(-r * r / (4.0 * t));
        }
    }
    return 0.0;
}

std::string Kernel::name() const {
    switch (profile) {
        case KernelProfile::UniformBall: return "uniform";
        case KernelProfile::Tent: return "tent";
        case KernelProfile::Gauss: return "heat";
    }
    return "?";
}

Kernel parse_kernel(const std::string& name, double eps) {
    if (name == "uniform" || name == "uniform-ball") return {KernelProfile::UniformBall, eps};
    if (name == "tent") return {KernelProfile::Tent, eps};
    if (name == "heat" || name == "gauss" || name == "gaussian")
        return {KernelProfile::Gauss, eps};
    throw std::runtime_error("unknown kernel profile: " + name);
}

DiscretizedKernel discretize(const Kernel& k, int dim, double h) {
    if (k.eps < h * (1.0 - 1e-12)) throw std::runtime_error("kernel-under-resolved");
    const double radius = k.support_radius();
    const int rc = static_cast<int>(std::floor(radius / h + 1e-9));

    DiscretizedKernel dk;
    dk.dim = dim;
    dk.h = h;
    dk.radius_cells = rc;

    std::vector<int> mi(dim, -rc);
    double total = 0.0;
    while (true) {
        double r2 = 0.0;
        for (int c : mi) r2 += double(c) * c;
        double r = h * std::sqrt(r2);
        double w = k.density(r, dim);
        if (w > 0) {
            dk.offsets.insert(dk.offsets.end(), mi.begin(), mi.end());
            dk.weights.push_back(w);
            total += w;
        }
        int axis = dim - 1;
        while (axis >= 0 && ++mi[axis] > rc) mi[axis--] = -rc;
        if (axis < 0) break;
    }
    if (total <= 0) throw std::runtime_error("kernel-under-resolved");
    for (double& w : dk.weights) w /= total;
    return dk;
}

} // namespace otlab
