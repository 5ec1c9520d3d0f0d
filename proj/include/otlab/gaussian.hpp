#pragma once

#include <vector>

#include "otlab/measures.hpp"

namespace otlab {

struct IsotropicGaussian {
    int n = 1;
    double s = 1.0; // standard deviation, > 0
    std::vector<double> mean;
};

// W2^2 between isotropic Gaussians, standard convention:
// |mean_a - mean_b|^2 + n (s_a - s_b)^2.
double w2_gaussians(const IsotropicGaussian& a, const IsotropicGaussian& b);

// Heat semigroup at time t: variance grows by 2t, mean unchanged.
IsotropicGaussian heat_step(const IsotropicGaussian& g, double t);

struct GaussianDeficit {
    double delta = 0.0; // n(|1-kappa|^2 - |Sigma_eps - kappa_eps|^2)
    double f = 0.0;     // 1 - (1+kappa)^2 / (Sigma_eps + kappa_eps)^2
};

// Closed-form deficit for gamma_1 vs gamma_kappa under the heat kernel at
// t = sqrt(eps); the two printed forms agree to 1e-12 (checked internally).
GaussianDeficit delta_eps_gaussian_closed_form(double kappa, double eps, int n);

// Lipschitz constant of the optimal map from a 1/Sigma-smooth source onto a
// 1/kappa-convex target: sqrt(kappa / Sigma).
double caffarelli_bound(double kappa, double sigma);

// Convolving a 1/kappa-log-concave measure with p_t gives 1/(kappa+2t).
double log_concavity_step(double kappa, double t);

// Cell masses by exact CDF differences on [-R_s, R_s] scaled per axis; 1D.
// Reports the truncated tail mass before normalization.
struct DiscretizedGaussian {
    GridMeasure measure;
    double truncated_mass = 0.0;
};
DiscretizedGaussian discretize_gaussian_1d(const IsotropicGaussian& g, double lo,
                                           double hi, double h);

struct StabGaussReport {
    double kappa = 0.0, eps = 0.0;
    double delta_closed = 0.0, delta_numeric = 0.0;
    double w2min_closed = 0.0, w2min_numeric = 0.0;
    double ratio_beta01 = 0.0, ratio_beta025 = 0.0; // w2min / (eps^-2 delta^(1-beta))
    double trunc_mass = 0.0;
};

// Full numerical pipeline on discretized 1D Gaussians gamma_1 vs gamma_kappa:
// deficit vs closed form, min_z W2^2 by mean matching, stability ratios.
StabGaussReport stabgauss_experiment(double kappa, double eps, double R, double h);

} // namespace otlab
