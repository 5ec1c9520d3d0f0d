#include "otlab/contraction.hpp"

#include "otlab/two_point.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace otlab {

namespace {

double norm(const double* v, int dim) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += v[a] * v[a];
    return std::sqrt(s);
}

} // namespace

ContractionReport delta_eps(const GridMeasure& lambda, const GridMeasure& mu,
                            const Kernel& k, const CostConvention& conv,
                            std::size_t pair_budget) {
    if (!lambda.is_probability() || !mu.is_probability())
        throw std::invalid_argument("delta_eps: probability measures required");

    TransportSolution s0 =
        solve(lower_to_discrete(lambda), lower_to_discrete(mu), conv, pair_budget);
    GridMeasure le = convolve(lambda, k), me = convolve(mu, k);
    TransportSolution s1 =
        solve(lower_to_discrete(le), lower_to_discrete(me), conv, pair_budget);

    ContractionReport rep;
    rep.p = conv.p;
    rep.kernel = k.name();
    rep.eps = k.eps;
    rep.wp = s0.cost;
    rep.wp_eps = s1.cost;
    rep.delta = s0.cost - s1.cost;
    rep.gap_sum = std::abs(s0.duality_gap) + std::abs(s1.duality_gap);
    return rep;
}

TranslationResult recover_translation(const DisplacementField& field) {
    if (field.p <= 1.0)
        throw std::invalid_argument("recover_translation: requires p > 1");
    const int dim = field.dim;
    TranslationResult res;
    res.z.assign(dim, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < field.base_mass.size(); ++i) {
        total += field.base_mass[i];
        for (int a = 0; a < dim; ++a)
            res.z[a] += field.base_mass[i] * field.xi[i * dim + a];
    }
    for (int a = 0; a < dim; ++a) res.z[a] /= total;
    std::vector<double> d(dim);
    for (std::size_t i = 0; i < field.base_mass.size(); ++i) {
        for (int a = 0; a < dim; ++a) d[a] = field.xi[i * dim + a] - res.z[a];
        res.residual += field.base_mass[i] * std::pow(norm(d.data(), dim), field.p);
    }
    return res;
}

DirectionResult recover_direction(const DisplacementField& field) {
    if (field.p != 1.0)
        throw std::invalid_argument("recover_direction: requires p = 1");
    const int dim = field.dim;
    DirectionResult res;
    res.e.assign(dim, 0.0);
    res.undefined_mass = field.undefined_mass;

    std::vector<double> z(dim, 0.0);
    double moved = 0.0;
    for (std::size_t i = 0; i < field.base_mass.size(); ++i) {
        if (!field.defined[i]) continue;
        moved += field.base_mass[i];
        for (int a = 0; a < dim; ++a)
            z[a] += field.base_mass[i] * field.xi[i * dim + a];
    }
    if (moved > 0)
        for (int a = 0; a < dim; ++a) z[a] /= moved;
    double zn = norm(z.data(), dim);
    if (zn < 1e-9) {
        res.degenerate = true; // cancellation: no direction to report
    } else {
        for (int a = 0; a < dim; ++a) res.e[a] = z[a] / zn;
    }
    std::vector<double> d(dim);
    for (std::size_t i = 0; i < field.base_mass.size(); ++i) {
        if (!field.defined[i]) continue;
        for (int a = 0; a < dim; ++a) d[a] = field.xi[i * dim + a] - res.e[a];
        res.residual += field.base_mass[i] * norm(d.data(), dim);
    }
    return res;
}

double marginal_stability(const GridMeasure& lambda, const GridMeasure& mu,
                          const std::vector<double>& e) {
    return wp_1d(project(lambda, e), project(mu, e), CostConvention{1.0, true});
}

double marginal_stability(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                          const std::vector<double>& e) {
    return wp_1d(project(lambda, e), project(mu, e), CostConvention{1.0, true});
}

namespace {

// displacement map of a solved problem as grid component fields
std::vector<ScalarField> displacement_fields(const CTransformField& ct,
                                             const DiscreteMeasure& mu,
                                             const CostConvention& conv) {
    const GridSpec& spec = ct.values.spec;
    const int dim = spec.dim;
    std::vector<ScalarField> f(dim, ScalarField(spec, 0.0));
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
        spec.center(i, x.data());
        const double* y = mu.point(ct.argmin[i]);
        double r = 0.0;
        for (int a = 0; a < dim; ++a) r += (x[a] - y[a]) * (x[a] - y[a]);
        r = std::sqrt(r);
        for (int a = 0; a < dim; ++a) {
            double v = x[a] - y[a];
            if (conv.p == 1.0) v = r < 1e-12 ? 0.0 : v / r;
            f[a][i] = v;
        }
    }
    return f;
}

} // namespace

ChainReport lambda_delta_chain(const GridMeasure& lambda, const GridMeasure& mu,
                               const Kernel& k, const CostConvention& conv,
                               double alpha, double C, std::size_t pair_budget) {
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    TransportSolution s0 = solve(dl, dm, conv, pair_budget);
    GridMeasure le = convolve(lambda, k), me = convolve(mu, k);
    DiscreteMeasure dle = lower_to_discrete(le), dme = lower_to_discrete(me);
    TransportSolution s1 = solve(dle, dme, conv, pair_budget);

    CTransformField ct0 = c_transform(s0.psi, dm, lambda.spec(), conv);
    DisplacementField xi = gradient_field(ct0, dm, lambda, conv);
    CTransformField ct1 = c_transform(s1.psi, dme, le.spec(), conv);
    std::vector<ScalarField> f = displacement_fields(ct1, dme, conv);

    ChainReport rep;
    rep.delta = s0.cost - s1.cost;
    rep.delta_pow = std::pow(std::max(rep.delta, 0.0), 1.0 / alpha);
    rep.lambda_eps_value = lambda_eps(xi, f, k, conv.p);
    rep.ratio = rep.lambda_eps_value > 0
                    ? rep.delta_pow / rep.lambda_eps_value
                    : std::numeric_limits<double>::infinity();
    rep.violation =
        rep.ratio < std::pow(C, 1.0 / alpha) * (1.0 - 1e-3) &&
        rep.lambda_eps_value > 0;

    // per-z samples of the strong-convexity integrand on kernel quadrature
    // nodes (midpoint nodes on the kernel support, kernel mass as weight)
    const GridSpec& spec = lambda.spec();
    DiscretizedKernel dk = discretize(k, spec.dim, spec.h);
    std::vector<double> z(spec.dim), x(spec.dim);
    for (std::size_t q = 0; q < dk.size(); ++q) {
        for (int a = 0; a < spec.dim; ++a)
            z[a] = dk.offsets[q * spec.dim + a] * spec.h;
        rep.z_nodes.insert(rep.z_nodes.end(), z.begin(), z.end());
        rep.z_weights.push_back(dk.weights[q]);

        // F_{lambda^z, mu^z}(psi^z) = W (translation invariance); competitor
        // value uses the c-concave extension of psi_eps to the shifted atoms
        GridTranslation lz = translate(lambda, z), mz = translate(mu, z);
        DiscreteMeasure dlz = lower_to_discrete(lz.measure);
        DiscreteMeasure dmz = lower_to_discrete(mz.measure);
        double F_eps = 0.0;
        for (std::size_t i = 0; i < dlz.size(); ++i)
            F_eps += dlz.weight(i) *
                     c_transform_at(s1.psi, dme, dlz.point(i), conv, nullptr);
        // psi_eps extended c-concavely through psi_eps^c on the lambda_eps side
        for (std::size_t j = 0; j < dmz.size(); ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < dle.size(); ++i)
                best = std::min(best, conv.cost(dle.point(i), dmz.point(j),
                                                spec.dim) - s1.psic[i]);
            F_eps += dmz.weight(j) * best;
        }
        rep.z_gap.push_back(s0.cost - F_eps);

        // integral |xi^z - xi_eps|^p d lambda^z: xi^z is xi carried with the
        // shift, xi_eps read off the grid fields
        double dist = 0.0;
        for (std::size_t i = 0; i < xi.base_mass.size(); ++i) {
            for (int a = 0; a < spec.dim; ++a)
                x[a] = xi.base[i * spec.dim + a] + z[a];
            std::size_t cell = f[0].spec.locate(x.data());
            if (cell == GridSpec::npos) continue;
            double r2 = 0.0;
            for (int a = 0; a < spec.dim; ++a) {
                double d = xi.xi[i * spec.dim + a] - f[a][cell];
                r2 += d * d;
            }
            dist += xi.base_mass[i] * std::pow(std::sqrt(r2), conv.p);
        }
        rep.z_dist.push_back(dist);
    }
    return rep;
}

} // namespace otlab
