#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/ot.hpp"
#include "otlab/rng.hpp"

namespace otlab {

// 1-Lipschitz by construction: min over cones a_k + |x - p_k|.  Closed under
// min and dense enough among 1-Lipschitz functions on compacts for testing.
struct LipschitzFunction {
    int dim = 1;
    std::vector<double> apex;   // flat K * dim
    std::vector<double> offset; // K

    double eval(const double* x) const;
    ScalarField sample(const GridSpec& grid) const;

    // worst finite-difference ratio between adjacent cells
    double lipschitz_audit(const GridSpec& grid) const;

    static LipschitzFunction random_cones(int dim, int count,
                                          const std::vector<double>& lo,
                                          const std::vector<double>& hi, Rng& rng);
};

// gap = integral (psi - phi) d(mu - lambda); cross-checked against
// W1 - integral phi d(mu - lambda) using the solver value w1.
double kantorovich_gap(const ScalarField& psi, const ScalarField& phi,
                       const GridMeasure& lambda, const GridMeasure& mu,
                       double w1);

// lambda-weighted L1 norm of grad psi - grad phi (centered differences,
// one-sided at the boundary).
double grad_l1_distance(const ScalarField& psi, const ScalarField& phi,
                        const GridMeasure& lambda);

// c-concave 1-Lipschitz extension of the dual values to the grid:
// psi(x) = max_j (psi_j - |x - y_j|), equal to the optimal potential on the
// mu support and admissible everywhere.
ScalarField extend_potential_1lip(const std::vector<double>& psi,
                                  const DiscreteMeasure& mu, const GridSpec& grid);

struct StabilityReport {
    std::vector<double> lhs, rhs; // per trial
    double w1 = 0.0;
    double fitted_exponent = 0.0; // slope of log lhs vs log rhs in the window
    double exponent_stderr = 0.0;
    double empirical_c_inv = 0.0; // min rhs / lhs^alpha over the window
    std::size_t window_count = 0; // trials with rhs in [1e-6, 1e-1]
};

StabilityReport thm1_family_check(const GridMeasure& lambda,
                                  const GridMeasure& mu, std::uint64_t seed,
                                  int trials, double alpha);

enum class ConvexityMode {
    Cubic,     // F-gap >= C (grad distance)^3
    Lipschitz, // F-gap >= const * grad distance, competitor map K-Lipschitz
};

struct ConvexityReport {
    std::vector<double> f_gap;     // F(psi) - F(phi) per instance
    std::vector<double> grad_dist; // integral |grad psi^c - grad phi^c|^2 d lambda
    double fitted_exponent = 0.0;  // slope of log f_gap vs log grad_dist
    double fitted_constant = 0.0;  // mode A: min gap/dist^exponent; mode B: min gap/dist
    double lipschitz_k = 0.0;      // mode B: audited constant of x - grad phi^c
};

ConvexityReport quadratic_convexity_check(const DiscreteMeasure& lambda,
                                          const DiscreteMeasure& mu, int trials,
                                          std::uint64_t seed, ConvexityMode mode,
                                          double k_lipschitz = 0.0);

} // namespace otlab
