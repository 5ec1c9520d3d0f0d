#pragma once

#include <string>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/ot.hpp"

namespace otlab {

// The p=1 transport density: line measure deposited along plan segments, with
// the ray-direction gradient of psi accumulated per cell (grad
// psi is exactly the unit ray direction on supp sigma).
struct TransportDensity {
    GridMeasure sigma;
    std::vector<double> grad_psi; // flat dim * cells, sigma-weighted mean ray direction
    std::string provenance;

    std::vector<double> cell_direction(std::size_t i) const;
};

// Deposit m * |x - y| along each plan segment, split across cells by exact
// segment-cell intersection length fraction.
TransportDensity compute_sigma(const TransportSolution& sol,
                               const DiscreteMeasure& lambda,
                               const DiscreteMeasure& mu, const GridSpec& grid);

// Total lambda-mass of cells where sigma vanishes within a 1-cell dilation;
// 0 when supp lambda is contained in supp sigma.
double support_inclusion(const GridMeasure& lambda, const TransportDensity& td);

// Renyi divergence D_alpha(lambda || sigma) on the shared grid; +infinity when
// lambda charges a cell with zero sigma.
double renyi(const GridMeasure& lambda, const TransportDensity& td, double alpha);

// Explicit Renyi bound C_{X,alpha,R} + (alpha/(alpha-1)) ln M - ln m with
// C = (1/(alpha-1)) ln(c1 |X| + c2 I_{2(alpha-1)}(X)),
// c1 = (2b/(1-2b)) n + 1, c2 = (2R+1)^{2b}, b = alpha - 1.
double renyi_bound(const Mask& support, double alpha, double R, double m, double M);

struct StabSigmaResult {
    double lhs = 0.0;   // ||grad psi - grad phi||^2 in L^2(sigma)
    double rhs = 0.0;   // 2 * integral (psi - phi) d(mu - lambda)
    double slack = 0.0; // rhs - lhs
};

// The sigma-weighted stability inequality with its explicit constant 2.  psi
// and phi live on the sigma grid; phi must pass a finite-difference Lipschitz
// audit at 1 + 10h.
StabSigmaResult stab_sigma_check(const ScalarField& psi, const ScalarField& phi,
                                 const TransportDensity& td,
                                 const GridMeasure& lambda,
                                 const GridMeasure& mu);

struct HolderTransferResult {
    double l1_lambda = 0.0;
    double lp_sigma = 0.0;
    double ratio = 0.0; // l1_lambda / lp_sigma
    double bound = 0.0; // assembled explicit constant
};

// Norm transfer from L^p(sigma) to L^1(lambda) through the Renyi machinery;
// m, M bound the lambda density on the support mask, R bounds the domain.
HolderTransferResult holder_transfer_check(const ScalarField& f,
                                           const GridMeasure& lambda,
                                           const TransportDensity& td,
                                           const Mask& support, double p,
                                           double m, double M, double R);

} // namespace otlab
