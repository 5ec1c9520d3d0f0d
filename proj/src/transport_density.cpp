#include "otlab/transport_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace otlab {

std::vector<double> TransportDensity::cell_direction(std::size_t i) const {
    const int dim = sigma.spec().dim;
    std::vector<double> u(dim, 0.0);
    double s = sigma.weight(i);
    if (s > 0)
        for (int a = 0; a < dim; ++a) u[a] = grad_psi[i * dim + a] / s;
    return u;
}

TransportDensity compute_sigma(const TransportSolution& sol,
                               const DiscreteMeasure& lambda,
                               const DiscreteMeasure& mu, const GridSpec& grid) {
    const int dim = grid.dim;
    if (lambda.dim() != dim || mu.dim() != dim)
        throw std::invalid_argument("compute_sigma: dimension mismatch");

    std::vector<double> w(grid.cell_count(), 0.0);
    std::vector<double> g(grid.cell_count() * dim, 0.0);
    std::vector<double> ts, mid(dim);

    for (const PlanArc& arc : sol.plan) {
        const double* x = lambda.point(arc.source);
        const double* y = mu.point(arc.target);
        double len = 0.0;
        for (int a = 0; a < dim; ++a) len += (y[a] - x[a]) * (y[a] - x[a]);
        len = std::sqrt(len);
        if (len == 0.0) continue; // zero-length arc deposits nothing
        const double line_mass = arc.mass * len;

        // split [0,1] at every cell-boundary crossing, then deposit each
        // sub-segment into the cell containing its midpoint
        ts.clear();
        ts.push_back(0.0);
        ts.push_back(1.0);
        for (int a = 0; a < dim; ++a) {
            if (x[a] == y[a]) continue;
            double lo = std::min(x[a], y[a]), hi = std::max(x[a], y[a]);
            int q0 = int(std::ceil((lo - grid.origin[a]) / grid.h));
            int q1 = int(std::floor((hi - grid.origin[a]) / grid.h));
            for (int q = q0; q <= q1; ++q) {
                double t = (grid.origin[a] + q * grid.h - x[a]) / (y[a] - x[a]);
                if (t > 0.0 && t < 1.0) ts.push_back(t);
            }
        }
        std::sort(ts.begin(), ts.end());

        for (std::size_t s = 0; s + 1 < ts.size(); ++s) {
            double span = ts[s + 1] - ts[s];
            if (span <= 0.0) continue;
            double tm = 0.5 * (ts[s] + ts[s + 1]);
            for (int a = 0; a < dim; ++a) mid[a] = x[a] + tm * (y[a] - x[a]);
            std::size_t cell = grid.locate(mid.data());
            if (cell == GridSpec::npos) throw std::runtime_error("grid-too-small");
            double dep = line_mass * span;
            w[cell] += dep;
            // grad psi on supp sigma is the unit ray direction toward y
            for (int a = 0; a < dim; ++a)
                g[cell * dim + a] += dep * (y[a] - x[a]) / len;
        }
    }

    std::ostringstream prov;
    prov << "# sigma from plan: " << sol.plan.size()
         << " arcs, exact segment-cell intersection";
    return TransportDensity{GridMeasure(grid, std::move(w)), std::move(g),
                            prov.str()};
}

double support_inclusion(const GridMeasure& lambda, const TransportDensity& td) {
    const GridSpec& sg = td.sigma.spec();
    const int dim = sg.dim;
    std::vector<double> x(dim);
    std::vector<int> mi(dim), mj(dim);

    double violation = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda.weight(i) <= 0) continue;
        lambda.spec().center(i, x.data());
        std::size_t cell = sg.locate(x.data());
        bool covered = false;
        if (cell != GridSpec::npos) {
            mi = sg.unflatten(cell);
            // 1-cell dilation: rasterized line mass lands only in crossed cells
            std::vector<int> off(dim, -1);
            while (true) {
                bool ok = true;
                for (int a = 0; a < dim; ++a) {
                    mj[a] = mi[a] + off[a];
                    if (mj[a] < 0 || mj[a] >= sg.dims[a]) ok = false;
                }
                if (ok && td.sigma.weight(sg.flatten(mj)) > 0) {
                    covered = true;
                    break;
                }
                int axis = dim - 1;
                while (axis >= 0 && ++off[axis] > 1) off[axis--] = -1;
                if (axis < 0) break;
            }
        }
        if (!covered) violation += lambda.weight(i);
    }
    return violation;
}

double renyi(const GridMeasure& lambda, const TransportDensity& td, double alpha) {
    if (!(alpha > 1.0)) throw std::invalid_argument("renyi: alpha must be > 1");
    if (!(lambda.spec() == td.sigma.spec()))
        throw std::invalid_argument("renyi: measures must share a grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        double l = lambda.weight(i);
        if (l <= 0) continue;
        double s = td.sigma.weight(i);
        if (s <= 0) return std::numeric_limits<double>::infinity();
        sum += l * std::pow(l / s, alpha - 1.0);
    }
    return std::log(sum) / (alpha - 1.0);
}

double renyi_bound(const Mask& support, double alpha, double R, double m,
                   double M) {
    if (!(alpha > 1.0) || !(alpha < 1.5))
        throw std::runtime_error("alpha-out-of-range");
    const double b = alpha - 1.0;
    const int n = support.spec.dim;
    const double c1 = (2.0 * b / (1.0 - 2.0 * b)) * n + 1.0;
    const double c2 = std::pow(2.0 * R + 1.0, 2.0 * b);
    const double volX = double(support.count()) * support.spec.cell_volume();
    const double I = erosion_integral(support, 2.0 * b);
    const double C = std::log(c1 * volX + c2 * I) / b;
    return C + (alpha / b) * std::log(M) - std::log(m);
}

namespace {

double lipschitz_constant(const ScalarField& phi) {
    const GridSpec& spec = phi.spec;
    double worst = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        auto mi = spec.unflatten(i);
        for (int a = 0; a < spec.dim; ++a) {
            if (mi[a] + 1 >= spec.dims[a]) continue;
            auto mj = mi;
            mj[a] += 1;
            worst = std::max(worst, std::abs(phi.values[spec.flatten(mj)] -
                                             phi.values[i]) / spec.h);
        }
    }
    return worst;
}

// integral of (psi - phi) against a measure living on a possibly different grid
double pair_integral(const ScalarField& psi, const ScalarField& phi,
                     const GridMeasure& m) {
    std::vector<double> x(m.spec().dim);
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.weight(i) <= 0) continue;
        m.spec().center(i, x.data());
        std::size_t cell = psi.spec.locate(x.data());
        if (cell == GridSpec::npos)
            throw std::runtime_error("grid-too-small");
        total += m.weight(i) * (psi.values[cell] - phi.values[cell]);
    }
    return total;
}

} // namespace

StabSigmaResult stab_sigma_check(const ScalarField& psi, const ScalarField& phi,
                                 const TransportDensity& td,
                                 const GridMeasure& lambda,
                                 const GridMeasure& mu) {
    if (!(psi.spec == phi.spec) || !(psi.spec == td.sigma.spec()))
        throw std::invalid_argument("stab_sigma_check: fields must share the sigma grid");
    if (lipschitz_constant(phi) > 1.0 + 10.0 * phi.spec.h)
        throw std::runtime_error("not-1-lipschitz");

    const int dim = psi.spec.dim;
    std::vector<ScalarField> gphi = phi.gradient();

    StabSigmaResult res;
    for (std::size_t i = 0; i < td.sigma.size(); ++i) {
        double s = td.sigma.weight(i);
        if (s <= 0) continue;
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double d = td.grad_psi[i * dim + a] / s - gphi[a][i];
            d2 += d * d;
        }
        res.lhs += s * d2;
    }
    res.rhs = 2.0 * (pair_integral(psi, phi, mu) - pair_integral(psi, phi, lambda));
    res.slack = res.rhs - res.lhs;
    return res;
}

HolderTransferResult holder_transfer_check(const ScalarField& f,
                                           const GridMeasure& lambda,
                                           const TransportDensity& td,
                                           const Mask& support, double p,
                                           double m, double M, double R) {
    if (!(p > 3.0))
        throw std::invalid_argument("holder_transfer_check: requires p > 3");
    if (!(f.spec == lambda.spec()) || !(f.spec == td.sigma.spec()))
        throw std::invalid_argument("holder_transfer_check: shared grid required");

    HolderTransferResult res;
    double lp = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        res.l1_lambda += lambda.weight(i) * std::abs(f.values[i]);
        lp += td.sigma.weight(i) * std::pow(std::abs(f.values[i]), p);
    }
    res.lp_sigma = std::pow(lp, 1.0 / p);
    res.ratio = res.lp_sigma > 0 ? res.l1_lambda / res.lp_sigma
                                 : (res.l1_lambda > 0
                                        ? std::numeric_limits<double>::infinity()
                                        : 0.0);
    // Hoelder through the density ratio: ||f||_1 <= ||f||_{L^p(sigma)}
    // exp(b D_{p'}(lambda||sigma) / p') with p' the conjugate, b = p' - 1
    const double pprime = p / (p - 1.0);
    const double b = pprime - 1.0;
    res.bound = std::exp(b * renyi_bound(support, pprime, R, m, M) / pprime);
    return res;
}

} // namespace otlab
