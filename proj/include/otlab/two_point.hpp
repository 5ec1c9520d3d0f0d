#pragma once

#include <cstddef>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/ot.hpp"
#include "otlab/rng.hpp"

namespace otlab {

// Lambda_eps(xi, f) = integral integral |xi(y) - f(x)|^p rho_eps(x-y) dx
// dlambda(y): xi on the lambda support, f componentwise on an ambient grid,
// kernel weights from the discretized normalized kernel.
double lambda_eps(const DisplacementField& xi, const std::vector<ScalarField>& f,
                  const Kernel& k, double p);

// Lattice rhat Z^n + zbar restricted to points nearest to some support cell,
// with ball masses lambda(B_r(x)) and nearest-neighbor adjacency.
struct GridGraph {
    int dim = 1;
    double r = 0.0, rhat = 0.0, eta = 0.0;
    std::vector<double> zbar;
    std::vector<double> node_pos; // flat dim * N
    std::vector<double> ball_mass;
    std::vector<std::vector<int>> adj;
    bool connected = false;

    std::size_t size() const { return ball_mass.size(); }
    const double* pos(std::size_t i) const { return node_pos.data() + i * dim; }
};

GridGraph build_grid_graph(const GridMeasure& lambda, double r, double eta,
                           const std::vector<double>& zbar);

// M0(r): worst ratio of an adjacent ball mass to the pair's overlap mass;
// +infinity when an overlap carries no mass, 1 for a single node.
double m0(const GridGraph& g, const GridMeasure& lambda);

// Shortest lattice chains I(x,x') for a set of node pairs: exhaustive for
// small graphs, uniform pair sampling with the scale factor recorded above.
struct ChainTable {
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::vector<int>> chains; // node id sequences incl. endpoints
    double kappa_geo = 0.0;               // worst rhat*steps / euclidean length
    bool exhaustive = true;
    double pair_scale = 1.0; // total pairs / sampled pairs
};

ChainTable build_chains(const GridGraph& g, Rng rng,
                        std::size_t exact_node_limit = 400,
                        std::size_t sample_pairs = 4000);

struct TauResult {
    double tau = 0.0;
    double std_error = 0.0; // sampling standard error at the arg-sup node
    std::size_t pairs_used = 0;
    double kappa_geo = 0.0;
};

// sup over chain nodes z of the pair sum: Hoelder form for p > 1, sup form
// for p = 1.
TauResult tau(const GridGraph& g, const ChainTable& chains, double p);

struct TwoPointResult {
    double lhs = 0.0;   // integral |xi - z|^p d lambda
    double bound = 0.0; // M0 * (eps/r)^n * tau * Lambda_eps
    double ratio = 0.0;
    double m0_value = 0.0, tau_value = 0.0, lambda_eps_value = 0.0;
};

TwoPointResult two_point_check(const GridMeasure& lambda,
                               const DisplacementField& xi,
                               const std::vector<ScalarField>& f, const Kernel& k,
                               double r, double eta, double p, Rng rng);

struct PoincareResult {
    double lhs = 0.0; // integral over X of |f - mean|^p dx
    double rhs = 0.0; // double kernel integral of |f(x)-f(y)|^p / |x-y|^p
    double ratio = 0.0;
};

PoincareResult nonlocal_poincare(const ScalarField& f, const Mask& domain,
                                 const Kernel& k, double p);

} // namespace otlab
