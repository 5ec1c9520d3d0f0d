#include "otlab/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "otlab/contraction.hpp"
#include "otlab/ot.hpp"

namespace otlab {

namespace {

double mean_component(const IsotropicGaussian& g, int a) {
    return a < int(g.mean.size()) ? g.mean[a] : 0.0;
}

double normal_cdf(double x, double mean, double s) {
    return 0.5 * (1.0 + std::erf((x - mean) / (s * std::sqrt(2.0))));
}

} // namespace

double w2_gaussians(const IsotropicGaussian& a, const IsotropicGaussian& b) {
    if (a.n != b.n) throw std::invalid_argument("w2_gaussians: dimension mismatch");
    double d2 = 0.0;
    for (int k = 0; k < a.n; ++k) {
        double d = mean_component(a, k) - mean_component(b, k);
        d2 += d * d;
    }
    return d2 + a.n * (a.s - b.s) * (a.s - b.s);
}

IsotropicGaussian heat_step(const IsotropicGaussian& g, double t) {
    if (t < 0) throw std::invalid_argument("heat_step: t must be >= 0");
    IsotropicGaussian out = g;
    out.s = std::sqrt(g.s * g.s + 2.0 * t);
    return out;
}

GaussianDeficit delta_eps_gaussian_closed_form(double kappa, double eps, int n) {
    const double t = std::sqrt(eps);
    const double se = std::sqrt(1.0 + 2.0 * t);
    const double ke = std::sqrt(kappa * kappa + 2.0 * t);
    GaussianDeficit out;
    out.delta = n * ((1.0 - kappa) * (1.0 - kappa) - (se - ke) * (se - ke));
    out.f = 1.0 - (1.0 + kappa) * (1.0 + kappa) / ((se + ke) * (se + ke));
    // the two printed forms are algebraically identical via
    // (ke - se)(ke + se) = kappa^2 - 1
    double alt = out.f * n * (1.0 - kappa) * (1.0 - kappa);
    double scale = std::max(1.0, n * (1.0 - kappa) * (1.0 - kappa));
    if (std::abs(out.delta - alt) > 1e-12 * scale)
        throw std::logic_error("gaussian deficit identity violated");
    return out;
}

double caffarelli_bound(double kappa, double sigma) {
    if (!(kappa > 0) || !(sigma > 0))
        throw std::invalid_argument("caffarelli_bound: parameters must be > 0");
    return std::sqrt(kappa / sigma);
}

double log_concavity_step(double kappa, double t) {
    if (kappa < 0 || t < 0)
        throw std::invalid_argument("log_concavity_step: parameters must be >= 0");
    return kappa + 2.0 * t;
}

DiscretizedGaussian discretize_gaussian_1d(const IsotropicGaussian& g, double lo,
                                           double hi, double h) {
    if (g.n != 1) throw std::invalid_argument("discretize_gaussian_1d: n must be 1");
    const double mean = mean_component(g, 0);
    int cells = int(std::ceil((hi - lo) / h - 1e-9));
    std::vector<double> w(cells);
    double total = 0.0;
    for (int i = 0; i < cells; ++i) {
        double a = lo + i * h, b = lo + (i + 1) * h;
        w[i] = normal_cdf(b, mean, g.s) - normal_cdf(a, mean, g.s);
        total += w[i];
    }
    for (double& x : w) x /= total;
    DiscretizedGaussian out{GridMeasure(GridSpec({lo}, h, {cells}), std::move(w)),
                            1.0 - total};
    return out;
}

StabGaussReport stabgauss_experiment(double kappa, double eps, double R, double h) {
    if (!(kappa >= 0.25 && kappa <= 4.0))
        throw std::invalid_argument("stabgauss_experiment: kappa outside [1/4, 4]");
    if (R < 8.0)
        throw std::invalid_argument("stabgauss_experiment: R must be >= 8");

    const double half = R * std::max(1.0, kappa);
    DiscretizedGaussian dl =
        discretize_gaussian_1d({1, 1.0, {0.0}}, -half, half, h);
    DiscretizedGaussian dm =
        discretize_gaussian_1d({1, kappa, {0.0}}, -half, half, h);
    double trunc = std::max(dl.truncated_mass, dm.truncated_mass);
    if (trunc > 1e-6) throw std::runtime_error("domain-too-small");

    StabGaussReport rep;
    rep.kappa = kappa;
    rep.eps = eps;
    rep.trunc_mass = trunc;

    GaussianDeficit closed = delta_eps_gaussian_closed_form(kappa, eps, 1);
    rep.delta_closed = closed.delta;

    CostConvention conv{2.0, false}; // the closed forms use the standard one
    ContractionReport cr =
        delta_eps(dl.measure, dm.measure, Kernel{KernelProfile::Gauss, eps}, conv);
    rep.delta_numeric = cr.delta;

    rep.w2min_closed = (1.0 - kappa) * (1.0 - kappa);
    // min over shifts by matching means, then the exact 1D distance
    DiscreteMeasure a = lower_to_discrete(dl.measure);
    DiscreteMeasure b = lower_to_discrete(dm.measure);
    double shift = a.mean()[0] - b.mean()[0];
    rep.w2min_numeric = wp_1d(a, translate(b, {shift}), conv);

    double d = std::max(rep.delta_numeric, 0.0);
    rep.ratio_beta01 =
        rep.w2min_numeric / (std::pow(eps, -2.0) * std::pow(d, 1.0 - 0.1));
    rep.ratio_beta025 =
        rep.w2min_numeric / (std::pow(eps, -2.0) * std::pow(d, 1.0 - 0.25));
    return rep;
}

} // namespace otlab
