#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "otlab/discrete.hpp"
#include "otlab/grid.hpp"

namespace otlab {

// Ground cost |x-y|^p, optionally with the 1/p factor.
struct CostConvention {
    double p = 2.0;
    bool p_normalized = true; // true: |x-y|^p / p, false: |x-y|^p

    double cost(const double* x, const double* y, int dim) const;
    double cost_from_distance(double r) const;
    std::string name() const;
};

struct PlanArc {
    std::size_t source; // index into the lambda-side support
    std::size_t target; // index into the mu-side support
    double mass;
};

struct TransportSolution {
    std::vector<PlanArc> plan;
    double cost = 0.0;
    std::vector<double> psi;  // dual value per mu-support point
    std::vector<double> psic; // dual value per lambda-support point
    double duality_gap = 0.0;
    CostConvention convention;

    void save(const std::string& path) const;
    static TransportSolution load(const std::string& path);
};

// Monotone (quantile) coupling cost between 1D measures, CDF merge.
double wp_1d(const DiscreteMeasure& a, const DiscreteMeasure& b,
             const CostConvention& conv);
// Same, with the monotone plan.
TransportSolution wp_1d_plan(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             const CostConvention& conv);

// Exact min-cost solve on the complete bipartite graph (network simplex),
// duals repaired to exact feasibility by a c-transform pass.
TransportSolution solve_discrete(const DiscreteMeasure& lambda,
                                 const DiscreteMeasure& mu,
                                 const CostConvention& conv,
                                 std::size_t pair_budget = 40000000);

// Dispatch: monotone coupling in 1D, network simplex otherwise.  The two
// agree within solver tolerance; 1D instances get exact zero-gap solutions.
TransportSolution solve(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                        const CostConvention& conv,
                        std::size_t pair_budget = 40000000);

// psi^c(x) = min over mu atoms of c(x,y) - psi(y), with the argmin recorded.
struct CTransformField {
    ScalarField values;
    std::vector<std::size_t> argmin;
};

CTransformField c_transform(const std::vector<double>& psi,
                            const DiscreteMeasure& mu, const GridSpec& grid,
                            const CostConvention& conv);

// Pointwise exact evaluation of psi^c at an arbitrary point.
double c_transform_at(const std::vector<double>& psi, const DiscreteMeasure& mu,
                      const double* x, const CostConvention& conv,
                      std::size_t* argmin = nullptr);

// Displacement xi(x) = Phi_p(grad psi^c(x)) per lambda-support point; equals
// x - T(x) for p > 1 and -grad psi(x) (a unit vector) for p = 1.
struct DisplacementField {
    int dim = 1;
    double p = 2.0;
    std::vector<double> base;      // flat, one point per entry
    std::vector<double> xi;        // flat
    std::vector<double> base_mass; // lambda mass per point
    std::vector<std::uint8_t> defined; // p=1: false where the cell is its own argmin
    double undefined_mass = 0.0;

    std::vector<double> point_xi(std::size_t i) const;
};

// grad psi^c taken analytically on the argmin branch.
DisplacementField gradient_field(const CTransformField& field,
                                 const DiscreteMeasure& mu,
                                 const GridMeasure& lambda,
                                 const CostConvention& conv);

// F_{lambda,mu}(psi) = integral(psi^c d lambda) + integral(psi d mu), with a
// fresh c-transform of psi against the lambda support.
double kantorovich_value(const std::vector<double>& psi,
                         const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                         const CostConvention& conv);

} // namespace otlab
