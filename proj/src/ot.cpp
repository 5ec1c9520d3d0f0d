#include "otlab/ot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "network_simplex.hpp"

namespace otlab {

double CostConvention::cost(const double* x, const double* y, int dim) const {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        double d = x[a] - y[a];
        r2 += d * d;
    }
    if (p == 2.0) return p_normalized ? 0.5 * r2 : r2;
    return cost_from_distance(std::sqrt(r2));
}

double CostConvention::cost_from_distance(double r) const {
    double c = p == 1.0 ? r : std::pow(r, p);
    return p_normalized ? c / p : c;
}

std::string CostConvention::name() const {
    std::ostringstream os;
    os << "p=" << p << (p_normalized ? " pnorm" : " standard");
    return os.str();
}

namespace {

void check_masses(double sa, double sb) {
    if (std::abs(sa - sb) > 1e-9) throw std::runtime_error("mass-mismatch");
}

struct Sorted1D {
    std::vector<std::size_t> order; // sorted position -> original index
    const DiscreteMeasure* m;
    double x(std::size_t k) const { return m->point(order[k])[0]; }
    double w(std::size_t k) const { return m->weight(order[k]); }
};

Sorted1D sort_1d(const DiscreteMeasure& m) {
    if (m.dim() != 1) throw std::invalid_argument("1D measure required");
    Sorted1D s;
    s.m = &m;
    s.order.resize(m.size());
    std::iota(s.order.begin(), s.order.end(), std::size_t(0));
    std::stable_sort(s.order.begin(), s.order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return m.point(a)[0] < m.point(b)[0];
                     });
    return s;
}

// Row minima of c(x_i, y_j) - psi[j] over sorted supports; the cost matrix is
// Monge for convex |x-y|^p, so argmins are nondecreasing and divide & conquer
// applies.
void monotone_row_min(const Sorted1D& sx, const Sorted1D& sy,
                      const std::vector<double>& psi_sorted,
                      const CostConvention& conv, std::size_t ilo, std::size_t ihi,
                      std::size_t jlo, std::size_t jhi, std::vector<double>& out) {
    if (ilo >= ihi) return;
    std::size_t mid = (ilo + ihi) / 2;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bj = jlo;
    for (std::size_t j = jlo; j < jhi; ++j) {
        double v = conv.cost_from_distance(std::abs(sx.x(mid) - sy.x(j))) -
                   psi_sorted[j];
        if (v < best) {
            best = v;
            bj = j;
        }
    }
    out[mid] = best;
    monotone_row_min(sx, sy, psi_sorted, conv, ilo, mid, jlo, bj + 1, out);
    monotone_row_min(sx, sy, psi_sorted, conv, mid + 1, ihi, bj, jhi, out);
}

} // namespace

double wp_1d(const DiscreteMeasure& a, const DiscreteMeasure& b,
             const CostConvention& conv) {
    Sorted1D sa = sort_1d(a), sb = sort_1d(b);
    double ma = a.total_mass(), mb = b.total_mass();
    check_masses(ma, mb);
    const double scale = ma / mb;

    // d always equals one of the residuals exactly, so the exhausted side
    // hits floating 0.0 and the advance tests are exact
    double cost = 0.0;
    std::size_t ia = 0, ib = 0;
    double ra = sa.w(0), rb = sb.w(0) * scale;
    while (true) {
        double d = std::min(ra, rb);
        cost += d * conv.cost_from_distance(std::abs(sa.x(ia) - sb.x(ib)));
        ra -= d;
        rb -= d;
        if (ra == 0) {
            if (ia + 1 == sa.order.size()) break;
            ra = sa.w(++ia);
        }
        if (rb == 0) {
            if (ib + 1 == sb.order.size()) break;
            rb = sb.w(++ib) * scale;
        }
    }
    return cost;
}

TransportSolution wp_1d_plan(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             const CostConvention& conv) {
    Sorted1D sa = sort_1d(a), sb = sort_1d(b);
    double ma = a.total_mass(), mb = b.total_mass();
    check_masses(ma, mb);
    const double scale = ma / mb;
    const std::size_t K = sa.order.size(), M = sb.order.size();

    TransportSolution sol;
    sol.convention = conv;

    // quantile merge; first/last source atom coupled to each sorted mu atom
    // drive the dual recursion below
    std::vector<std::size_t> last_source(M, 0);
    std::vector<std::size_t> first_source(M, std::size_t(-1));
    std::size_t ia = 0, ib = 0;
    double ra = sa.w(0), rb = sb.w(0) * scale;
    while (true) {
        double d = std::min(ra, rb);
        sol.plan.push_back({sa.order[ia], sb.order[ib], d});
        sol.cost += d * conv.cost_from_distance(std::abs(sa.x(ia) - sb.x(ib)));
        if (first_source[ib] == std::size_t(-1)) first_source[ib] = ia;
        last_source[ib] = ia;
        ra -= d;
        rb -= d;
        if (ra == 0) {
            if (ia + 1 == K) break;
            ra = sa.w(++ia);
        }
        if (rb == 0) {
            if (ib + 1 == M) break;
            rb = sb.w(++ib) * scale;
        }
    }

    // duals: psi integrated along the sorted mu support.  The increment is
    // admissible anywhere between the last source of atom k-1 and the first
    // source of atom k; when they differ, evaluating strictly between them
    // keeps the c-transform argmin strict at both boundary sources (a shared
    // source forces an exact tie, which is the genuinely ambiguous case).
    std::vector<double> psi_sorted(M, 0.0);
    for (std::size_t k = 1; k < M; ++k) {
        std::size_t lo = last_source[k - 1], hi = first_source[k];
        double xb = lo == hi ? sa.x(lo) : 0.5 * (sa.x(lo) + sa.x(hi));
        psi_sorted[k] = psi_sorted[k - 1] +
                        conv.cost_from_distance(std::abs(sb.x(k) - xb)) -
                        conv.cost_from_distance(std::abs(sb.x(k - 1) - xb));
    }
    std::vector<double> psic_sorted(K, 0.0);
    monotone_row_min(sa, sb, psi_sorted, conv, 0, K, 0, M, psic_sorted);

    sol.psi.resize(M);
    sol.psic.resize(K);
    double F = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        sol.psi[sb.order[k]] = psi_sorted[k];
        F += sb.w(k) * scale * psi_sorted[k];
    }
    for (std::size_t k = 0; k < K; ++k) {
        sol.psic[sa.order[k]] = psic_sorted[k];
        F += sa.w(k) * psic_sorted[k];
    }
    sol.duality_gap = sol.cost - F;
    return sol;
}

TransportSolution solve_discrete(const DiscreteMeasure& lambda,
                                 const DiscreteMeasure& mu,
                                 const CostConvention& conv,
                                 std::size_t pair_budget) {
    double ma = lambda.total_mass(), mb = mu.total_mass();
    check_masses(ma, mb);
    if (lambda.size() * mu.size() > pair_budget)
        throw std::runtime_error("problem-too-large");

    std::vector<double> b = mu.weights();
    const double scale = ma / mb;
    for (double& w : b) w *= scale;

    detail::SimplexResult r = detail::transport_simplex(
        lambda.dim(), lambda.size(), lambda.points().data(),
        lambda.weights().data(), mu.size(), mu.points().data(), b.data(), conv);

    TransportSolution sol;
    sol.convention = conv;
    sol.plan = std::move(r.plan);
    sol.cost = r.cost;

    // repair duals to exact feasibility: one full c-transform pass each way
    const std::size_t K = lambda.size(), M = mu.size();
    sol.psi = std::move(r.v);
    sol.psic.assign(K, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < M; ++j)
            best = std::min(best, conv.cost(lambda.point(i), mu.point(j),
                                            lambda.dim()) - sol.psi[j]);
        sol.psic[i] = best;
    }
    for (std::size_t j = 0; j < M; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < K; ++i)
            best = std::min(best, conv.cost(lambda.point(i), mu.point(j),
                                            lambda.dim()) - sol.psic[i]);
        sol.psi[j] = best;
    }
    double F = 0.0;
    for (std::size_t i = 0; i < K; ++i) F += lambda.weight(i) * sol.psic[i];
    for (std::size_t j = 0; j < M; ++j) F += b[j] * sol.psi[j];
    sol.duality_gap = sol.cost - F;
    return sol;
}

TransportSolution solve(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                        const CostConvention& conv, std::size_t pair_budget) {
    if (lambda.dim() == 1) return wp_1d_plan(lambda, mu, conv);
    return solve_discrete(lambda, mu, conv, pair_budget);
}

double c_transform_at(const std::vector<double>& psi, const DiscreteMeasure& mu,
                      const double* x, const CostConvention& conv,
                      std::size_t* argmin) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bj = 0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        double v = conv.cost(x, mu.point(j), mu.dim()) - psi[j];
        if (v < best) { // strict: ties keep the lowest atom index
            best = v;
            bj = j;
        }
    }
    if (argmin) *argmin = bj;
    return best;
}

CTransformField c_transform(const std::vector<double>& psi,
                            const DiscreteMeasure& mu, const GridSpec& grid,
                            const CostConvention& conv) {
    if (psi.size() != mu.size())
        throw std::invalid_argument("c_transform: psi size mismatch");
    if (grid.dim != mu.dim())
        throw std::invalid_argument("c_transform: dimension mismatch");
    CTransformField out;
    out.values = ScalarField(grid, 0.0);
    out.argmin.resize(grid.cell_count());
    std::vector<double> x(grid.dim);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        grid.center(i, x.data());
        out.values[i] = c_transform_at(psi, mu, x.data(), conv, &out.argmin[i]);
    }
    return out;
}

std::vector<double> DisplacementField::point_xi(std::size_t i) const {
    return {xi.begin() + i * dim, xi.begin() + (i + 1) * dim};
}

DisplacementField gradient_field(const CTransformField& field,
                                 const DiscreteMeasure& mu,
                                 const GridMeasure& lambda,
                                 const CostConvention& conv) {
    if (!(field.values.spec == lambda.spec()))
        throw std::invalid_argument("gradient_field: grid mismatch");
    const GridSpec& spec = lambda.spec();
    const int dim = spec.dim;

    DisplacementField out;
    out.dim = dim;
    out.p = conv.p;
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        double w = lambda.weight(i);
        if (w <= 0) continue;
        spec.center(i, x.data());
        const double* y = mu.point(field.argmin[i]);
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double d = x[a] - y[a];
            r2 += d * d;
        }
        double r = std::sqrt(r2);

        out.base.insert(out.base.end(), x.begin(), x.end());
        out.base_mass.push_back(w);
        if (conv.p == 1.0) {
            // grad psi^c on the argmin branch is the unit vector toward x;
            // undefined when the cell is its own argmin
            if (r < 1e-12) {
                out.defined.push_back(0);
                out.undefined_mass += w;
                for (int a = 0; a < dim; ++a) out.xi.push_back(0.0);
            } else {
                out.defined.push_back(1);
                for (int a = 0; a < dim; ++a) out.xi.push_back((x[a] - y[a]) / r);
            }
        } else {
            // Phi_p inverts z -> |z|^{p-2} z, so xi collapses to x - y*
            out.defined.push_back(1);
            for (int a = 0; a < dim; ++a) out.xi.push_back(x[a] - y[a]);
        }
    }
    return out;
}

double kantorovich_value(const std::vector<double>& psi,
                         const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                         const CostConvention& conv) {
    if (psi.size() != mu.size())
        throw std::invalid_argument("kantorovich_value: psi size mismatch");
    double F = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i)
        F += lambda.weight(i) *
             c_transform_at(psi, mu, lambda.point(i), conv, nullptr);
    for (std::size_t j = 0; j < mu.size(); ++j) F += mu.weight(j) * psi[j];
    return F;
}

void TransportSolution::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << "CONV p " << convention.p << " scale "
        << (convention.p_normalized ? "pnorm" : "standard") << "\n";
    out << "PLAN " << plan.size() << "\n";
    for (const PlanArc& a : plan)
        out << a.source << " " << a.target << " " << a.mass << "\n";
    out << "PSI " << psi.size() << "\n";
    for (double v : psi) out << v << "\n";
    out << "PSIC " << psic.size() << "\n";
    for (double v : psic) out << v << "\n";
    out << "COST " << cost << "\n";
    out << "GAP " << duality_gap << "\n";
}

TransportSolution TransportSolution::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    TransportSolution sol;
    std::string tag;
    while (in >> tag) {
        if (tag == "CONV") {
            std::string key, scale;
            in >> key >> sol.convention.p >> key >> scale;
            sol.convention.p_normalized = scale == "pnorm";
        } else if (tag == "PLAN") {
            std::size_t count;
            in >> count;
            sol.plan.resize(count);
            for (PlanArc& a : sol.plan) in >> a.source >> a.target >> a.mass;
        } else if (tag == "PSI" || tag == "PSIC") {
            std::size_t count;
            in >> count;
            auto& v = tag == "PSI" ? sol.psi : sol.psic;
            v.resize(count);
            for (double& x : v) in >> x;
        } else if (tag == "COST") {
            in >> sol.cost;
        } else if (tag == "GAP") {
            in >> sol.duality_gap;
        } else {
            throw std::runtime_error("bad transport solution file: " + tag);
        }
    }
    return sol;
}

} // namespace otlab
