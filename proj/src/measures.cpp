#include "otlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace otlab {

GridMeasure convolve(const GridMeasure& m, const Kernel& k, std::size_t cell_budget) {
    const GridSpec& in = m.spec();
    DiscretizedKernel dk = discretize(k, in.dim, in.h);
    const int rc = dk.radius_cells;

    std::vector<double> origin = in.origin;
    std::vector<int> dims = in.dims;
    for (int a = 0; a < in.dim; ++a) {
        origin[a] -= rc * in.h;
        dims[a] += 2 * rc;
    }
    std::size_t count = 1;
    for (int d : dims) count *= static_cast<std::size_t>(d);
    if (count > cell_budget) throw std::runtime_error("grid-budget");
    GridSpec out(origin, in.h, dims);

    std::vector<double> w(out.cell_count(), 0.0);
    std::vector<int> mi(in.dim), mo(in.dim);
    for (std::size_t i = 0; i < m.size(); ++i) {
        double wi = m.weight(i);
        if (wi == 0) continue;
        mi = in.unflatten(i);
        for (std::size_t q = 0; q < dk.size(); ++q) {
            for (int a = 0; a < in.dim; ++a)
                mo[a] = mi[a] + rc + dk.offsets[q * in.dim + a];
            w[out.flatten(mo)] += wi * dk.weights[q];
        }
    }
    return GridMeasure(std::move(out), std::move(w));
}

GridTranslation translate(const GridMeasure& m, const std::vector<double>& z) {
    const GridSpec& spec = m.spec();
    if (static_cast<int>(z.size()) != spec.dim)
        throw std::invalid_argument("translate: dimension mismatch");
    std::vector<double> origin = spec.origin, residual(spec.dim);
    for (int a = 0; a < spec.dim; ++a) {
        double cells = std::round(z[a] / spec.h);
        origin[a] += cells * spec.h;
        residual[a] = z[a] - cells * spec.h;
    }
    GridSpec out(origin, spec.h, spec.dims);
    return {GridMeasure(std::move(out), m.weights()), std::move(residual)};
}

DiscreteMeasure translate(const DiscreteMeasure& m, const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != m.dim())
        throw std::invalid_argument("translate: dimension mismatch");
    std::vector<double> pts = m.points();
    for (std::size_t i = 0; i < m.size(); ++i)
        for (int a = 0; a < m.dim(); ++a) pts[i * m.dim() + a] += z[a];
    return DiscreteMeasure(m.dim(), std::move(pts), m.weights());
}

namespace {

void check_unit(const std::vector<double>& e) {
    double n2 = 0.0;
    for (double c : e) n2 += c * c;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) throw std::runtime_error("bad-direction");
}

double projected_value(const double* x, const std::vector<double>& e,
                       ProjectionMode mode) {
    if (mode == ProjectionMode::Scalar) {
        double v = 0.0;
        for (std::size_t a = 0; a < e.size(); ++a) v += x[a] * e[a];
        return v;
    }
    if (e.size() != 2)
        throw std::runtime_error("bad-direction"); // Perp is n=2 only
    return -e[1] * x[0] + e[0] * x[1];
}

DiscreteMeasure project_points(int dim, const std::vector<double>& pts,
                               const std::vector<double>& w,
                               const std::vector<double>& e, ProjectionMode mode) {
    check_unit(e);
    std::vector<double> vals(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        vals[i] = projected_value(pts.data() + i * dim, e, mode);
    return sorted_1d(DiscreteMeasure(1, std::move(vals), w));
}

} // namespace

DiscreteMeasure project(const GridMeasure& m, const std::vector<double>& e,
                        ProjectionMode mode) {
    DiscreteMeasure d = lower_to_discrete(m);
    return project_points(d.dim(), d.points(), d.weights(), e, mode);
}

DiscreteMeasure project(const DiscreteMeasure& m, const std::vector<double>& e,
                        ProjectionMode mode) {
    return project_points(m.dim(), m.points(), m.weights(), e, mode);
}

double erosion_integral(const Mask& mask, double alpha) {
    if (mask.empty()) throw std::runtime_error("empty-support");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("erosion_integral: alpha must be in (0,1)");
    ScalarField d = distance_transform(mask);
    const double vol = mask.spec.cell_volume();
    double total = 0.0;
    for (std::size_t i = 0; i < mask.in.size(); ++i)
        if (mask.in[i]) total += vol * std::pow(d.values[i], -alpha);
    return total;
}

DominanceResult stochastic_dominance_1d(const DiscreteMeasure& a,
                                        const DiscreteMeasure& b) {
    if (a.dim() != 1 || b.dim() != 1)
        throw std::invalid_argument("stochastic dominance requires 1D measures");
    if (std::abs(a.total_mass() - b.total_mass()) > 1e-9)
        throw std::runtime_error("mass-mismatch");
    DiscreteMeasure sa = sorted_1d(a), sb = sorted_1d(b);

    // walk the merged support; CDFs are right-continuous step functions
    double cdfa = 0.0, cdfb = 0.0, violation = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < sa.size() || ib < sb.size()) {
        double t;
        if (ib == sb.size()) t = sa.point(ia)[0];
        else if (ia == sa.size()) t = sb.point(ib)[0];
        else t = std::min(sa.point(ia)[0], sb.point(ib)[0]);
        while (ia < sa.size() && sa.point(ia)[0] <= t) cdfa += sa.weight(ia++);
        while (ib < sb.size() && sb.point(ib)[0] <= t) cdfb += sb.weight(ib++);
        violation = std::max(violation, cdfb - cdfa);
    }
    return {violation <= 1e-9, std::max(violation, 0.0)};
}

double monotone_gap(const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                    const std::vector<double>& e, int family_size, Rng rng) {
    check_unit(e);
    if (family_size < 1)
        throw std::invalid_argument("monotone_gap: family size must be >= 1");

    auto proj = [&](const DiscreteMeasure& m, std::size_t i) {
        double v = 0.0;
        for (int a = 0; a < m.dim(); ++a) v += m.point(i)[a] * e[a];
        return v;
    };
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        lo = std::min(lo, proj(lambda, i));
        hi = std::max(hi, proj(lambda, i));
    }
    for (std::size_t i = 0; i < mu.size(); ++i) {
        lo = std::min(lo, proj(mu, i));
        hi = std::max(hi, proj(mu, i));
    }
    const double span = std::max(hi - lo, 1e-12);

    auto gap_of = [&](auto&& phi) {
        double g = 0.0;
        for (std::size_t i = 0; i < lambda.size(); ++i)
            g += lambda.weight(i) * phi(proj(lambda, i));
        for (std::size_t i = 0; i < mu.size(); ++i)
            g -= mu.weight(i) * phi(proj(mu, i));
        return g;
    };

    // phi(x) = <x,e> is always in the family
    double best = gap_of([](double s) { return s; });

    const int ramps_per_phi = 4;
    for (int kf = 1; kf < family_size; ++kf) {
        std::vector<double> a(ramps_per_phi), b(ramps_per_phi);
        for (int j = 0; j < ramps_per_phi; ++j) {
            a[j] = rng.uniform(lo - 0.1 * span, hi);
            b[j] = rng.uniform(0.05 * span, 1.2 * span);
        }
        // mean of clamped ramps: each term 1-Lipschitz nondecreasing in e,
        // so the average is too
        best = std::max(best, gap_of([&](double s) {
            double v = 0.0;
            for (int j = 0; j < ramps_per_phi; ++j)
                v += std::clamp(s - a[j], 0.0, b[j]);
            return v / ramps_per_phi;
        }));
    }
    return best;
}

} // namespace otlab
