#pragma once

#include <string>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/ot.hpp"

namespace otlab {

// One full deficit computation: both distances solved with identical solver
// settings, the deficit reported with an a-posteriori error bar equal to the
// sum of duality gaps.
struct ContractionReport {
    double p = 2.0;
    std::string kernel;
    double eps = 0.0;
    double wp = 0.0;     // W_p^p(lambda, mu)
    double wp_eps = 0.0; // W_p^p(lambda_eps, mu_eps)
    double delta = 0.0;  // wp - wp_eps
    double gap_sum = 0.0;
};

ContractionReport delta_eps(const GridMeasure& lambda, const GridMeasure& mu,
                            const Kernel& k, const CostConvention& conv,
                            std::size_t pair_budget = 40000000);

struct TranslationResult {
    std::vector<double> z;  // lambda-mean of xi
    double residual = 0.0;  // integral |xi - z|^p d lambda
};

// p > 1 rigidity data: the field is constant iff mu is a translate of lambda.
TranslationResult recover_translation(const DisplacementField& field);

struct DirectionResult {
    std::vector<double> e;
    double residual = 0.0;       // integral |grad psi - e| d lambda, defined mass
    bool degenerate = false;     // mean displacement below 1e-9
    double undefined_mass = 0.0; // lambda mass where grad psi is undefined
};

// p = 1 rigidity data: unit direction of the mean displacement on moved mass.
DirectionResult recover_direction(const DisplacementField& field);

// W_1 of the scalar projections p_e # lambda and p_e # mu.
double marginal_stability(const GridMeasure& lambda, const GridMeasure& mu,
                          const std::vector<double>& e);
double marginal_stability(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                          const std::vector<double>& e);

// Per-z diagnostics of the strong-convexity hypothesis on kernel-support
// quadrature nodes, plus the delta^(1/alpha) vs Lambda_eps comparison.
struct ChainReport {
    double delta = 0.0;
    double delta_pow = 0.0; // delta^(1/alpha), clamped at 0
    double lambda_eps_value = 0.0;
    double ratio = 0.0; // delta_pow / lambda_eps_value
    bool violation = false;
    std::vector<double> z_nodes;   // flat, dim per node
    std::vector<double> z_weights; // kernel mass per node
    std::vector<double> z_gap;     // F_{lambda^z,mu^z}(psi^z) - F(psi_eps)
    std::vector<double> z_dist;    // integral |xi^z - xi_eps|^p d lambda^z
};

ChainReport lambda_delta_chain(const GridMeasure& lambda, const GridMeasure& mu,
                               const Kernel& k, const CostConvention& conv,
                               double alpha, double C,
                               std::size_t pair_budget = 40000000);

} // namespace otlab
