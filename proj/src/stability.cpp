#include "otlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otlab {

double LipschitzFunction::eval(const double* x) const {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t K = offset.size();
    for (std::size_t k = 0; k < K; ++k) {
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double d = x[a] - apex[k * dim + a];
            d2 += d * d;
        }
        best = std::min(best, offset[k] + std::sqrt(d2));
    }
    return best;
}

ScalarField LipschitzFunction::sample(const GridSpec& grid) const {
    ScalarField out(grid, 0.0);
    std::vector<double> x(grid.dim);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        grid.center(i, x.data());
        out[i] = eval(x.data());
    }
    return out;
}

double LipschitzFunction::lipschitz_audit(const GridSpec& grid) const {
    ScalarField f = sample(grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        auto mi = grid.unflatten(i);
        for (int a = 0; a < grid.dim; ++a) {
            if (mi[a] + 1 >= grid.dims[a]) continue;
            auto mj = mi;
            mj[a] += 1;
            worst = std::max(
                worst, std::abs(f.values[grid.flatten(mj)] - f.values[i]) / grid.h);
        }
    }
    return worst;
}

LipschitzFunction LipschitzFunction::random_cones(int dim, int count,
                                                  const std::vector<double>& lo,
                                                  const std::vector<double>& hi,
                                                  Rng& rng) {
    LipschitzFunction f;
    f.dim = dim;
    double diam = 0.0;
    for (int a = 0; a < dim; ++a) diam += (hi[a] - lo[a]) * (hi[a] - lo[a]);
    diam = std::sqrt(diam);
    for (int k = 0; k < count; ++k) {
        for (int a = 0; a < dim; ++a) f.apex.push_back(rng.uniform(lo[a], hi[a]));
        f.offset.push_back(rng.uniform(-0.5 * diam, 0.5 * diam));
    }
    return f;
}

namespace {

double measure_integral(const ScalarField& field, const GridMeasure& m) {
    std::vector<double> x(m.spec().dim);
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.weight(i) <= 0) continue;
        m.spec().center(i, x.data());
        std::size_t cell = field.spec.locate(x.data());
        if (cell == GridSpec::npos) throw std::runtime_error("grid-too-small");
        total += m.weight(i) * field.values[cell];
    }
    return total;
}

struct Fit {
    double slope = 0.0, stderr_ = 0.0;
    std::size_t used = 0;
};

Fit log_log_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] > 0 && ys[i] > 0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    Fit fit;
    fit.used = lx.size();
    if (lx.size() < 2) return fit;
    double n = double(lx.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom <= 0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    double b = (sy - fit.slope * sx) / n, ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double r = ly[i] - fit.slope * lx[i] - b;
        ss += r * r;
    }
    if (lx.size() > 2)
        fit.stderr_ = std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n));
    return fit;
}

} // namespace

double kantorovich_gap(const ScalarField& psi, const ScalarField& phi,
                       const GridMeasure& lambda, const GridMeasure& mu,
                       double w1) {
    double psi_pair = measure_integral(psi, mu) - measure_integral(psi, lambda);
    double phi_pair = measure_integral(phi, mu) - measure_integral(phi, lambda);
    double gap = psi_pair - phi_pair;
    double alt = w1 - phi_pair;
    if (std::abs(gap - alt) > 1e-8 * (1.0 + std::abs(w1)))
        throw std::runtime_error("inconsistent-dual");
    return gap;
}

double grad_l1_distance(const ScalarField& psi, const ScalarField& phi,
                        const GridMeasure& lambda) {
    if (!(psi.spec == phi.spec))
        throw std::invalid_argument("grad_l1_distance: field grids differ");
    std::vector<ScalarField> gp = psi.gradient(), gq = phi.gradient();
    const int dim = psi.spec.dim;
    std::vector<double> x(lambda.spec().dim);
    double total = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda.weight(i) <= 0) continue;
        lambda.spec().center(i, x.data());
        std::size_t cell = psi.spec.locate(x.data());
        if (cell == GridSpec::npos) throw std::runtime_error("grid-too-small");
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double d = gp[a][cell] - gq[a][cell];
            d2 += d * d;
        }
        total += lambda.weight(i) * std::sqrt(d2);
    }
    return total;
}

ScalarField extend_potential_1lip(const std::vector<double>& psi,
                                  const DiscreteMeasure& mu,
                                  const GridSpec& grid) {
    if (psi.size() != mu.size())
        throw std::invalid_argument("extend_potential_1lip: psi size mismatch");
    ScalarField out(grid, 0.0);
    std::vector<double> x(grid.dim);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        grid.center(i, x.data());
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < mu.size(); ++j) {
            double d2 = 0.0;
            for (int a = 0; a < grid.dim; ++a) {
                double d = x[a] - mu.point(j)[a];
                d2 += d * d;
            }
            best = std::max(best, psi[j] - std::sqrt(d2));
        }
        out[i] = best;
    }
    return out;
}

namespace {

// smallest aligned grid (same h as the reference) covering both measures
GridSpec hull_grid(const GridMeasure& a, const GridMeasure& b) {
    const GridSpec& sa = a.spec();
    const GridSpec& sb = b.spec();
    if (sa.dim != sb.dim || std::abs(sa.h - sb.h) > 1e-12 * sa.h)
        throw std::invalid_argument("hull_grid: incompatible grids");
    std::vector<double> origin(sa.dim);
    std::vector<int> dims(sa.dim);
    for (int k = 0; k < sa.dim; ++k) {
        double lo = std::min(sa.origin[k], sb.origin[k]);
        double hi = std::max(sa.origin[k] + sa.dims[k] * sa.h,
                             sb.origin[k] + sb.dims[k] * sb.h);
        // keep alignment with grid a
        double cells_back = std::ceil((sa.origin[k] - lo) / sa.h - 1e-9);
        origin[k] = sa.origin[k] - cells_back * sa.h;
        dims[k] = int(std::ceil((hi - origin[k]) / sa.h - 1e-9));
    }
    return GridSpec(origin, sa.h, dims);
}

} // namespace

StabilityReport thm1_family_check(const GridMeasure& lambda,
                                  const GridMeasure& mu, std::uint64_t seed,
                                  int trials, double alpha) {
    if (!(alpha > 3.0))
        throw std::invalid_argument("thm1_family_check: requires alpha > 3");
    CostConvention conv{1.0, true};
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    TransportSolution sol = solve(dl, dm, conv);

    GridSpec grid = hull_grid(lambda, mu);
    ScalarField psi = extend_potential_1lip(sol.psi, dm, grid);

    std::vector<double> lo(grid.dim), hi(grid.dim);
    for (int a = 0; a < grid.dim; ++a) {
        lo[a] = grid.origin[a];
        hi[a] = grid.origin[a] + grid.dims[a] * grid.h;
    }

    StabilityReport rep;
    rep.w1 = sol.cost;
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        ScalarField phi;
        if (t == 0) {
            phi = psi; // contributes (0, 0); excluded from the regression window
        } else {
            int cones = 2 + int(rng.uniform_index(6));
            LipschitzFunction f =
                LipschitzFunction::random_cones(grid.dim, cones, lo, hi, rng);
            if (f.lipschitz_audit(grid) > 1.0 + 10.0 * grid.h) continue;
            phi = f.sample(grid);
        }
        rep.lhs.push_back(grad_l1_distance(psi, phi, lambda));
        rep.rhs.push_back(kantorovich_gap(psi, phi, lambda, mu, sol.cost));
    }

    // regression window: below 1e-6 solver gaps dominate, above 1e-1 the
    // asymptotic regime is gone
    std::vector<double> wx, wy;
    for (std::size_t i = 0; i < rep.lhs.size(); ++i)
        if (rep.rhs[i] >= 1e-6 && rep.rhs[i] <= 1e-1) {
            wx.push_back(rep.rhs[i]);
            wy.push_back(rep.lhs[i]);
        }
    if (wx.empty()) throw std::runtime_error("family-degenerate");
    Fit fit = log_log_fit(wx, wy);
    rep.fitted_exponent = fit.slope;
    rep.exponent_stderr = fit.stderr_;
    rep.window_count = wx.size();
    rep.empirical_c_inv = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < wx.size(); ++i)
        if (wy[i] > 0)
            rep.empirical_c_inv =
                std::min(rep.empirical_c_inv, wx[i] / std::pow(wy[i], alpha));
    return rep;
}

ConvexityReport quadratic_convexity_check(const DiscreteMeasure& lambda,
                                          const DiscreteMeasure& mu, int trials,
                                          std::uint64_t seed, ConvexityMode mode,
                                          double k_lipschitz) {
    CostConvention conv{2.0, true};
    TransportSolution sol = solve_discrete(lambda, mu, conv);
    const int dim = lambda.dim();
    const std::size_t K = lambda.size();

    auto transport_targets = [&](const std::vector<double>& psi) {
        std::vector<std::size_t> t(K);
        for (std::size_t i = 0; i < K; ++i)
            c_transform_at(psi, mu, lambda.point(i), conv, &t[i]);
        return t;
    };
    std::vector<std::size_t> t0 = transport_targets(sol.psi);
    double f0 = kantorovich_value(sol.psi, lambda, mu, conv);

    ConvexityReport rep;
    rep.lipschitz_k = 0.0;
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        // perturbation magnitudes spanning three decades of F-gaps
        double s = trials > 1 ? 0.5 * std::pow(10.0, -1.5 * t / double(trials - 1))
                              : 0.1;
        std::vector<double> w = mu.weights();
        for (double& x : w) x *= 1.0 + rng.uniform(-s, s);
        DiscreteMeasure mup =
            DiscreteMeasure(dim, mu.points(), std::move(w)).normalized();
        TransportSolution pert = solve_discrete(lambda, mup, conv);

        double fgap = f0 - kantorovich_value(pert.psi, lambda, mu, conv);
        std::vector<std::size_t> t1 = transport_targets(pert.psi);
        double dist = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                double d = mu.point(t0[i])[a] - mu.point(t1[i])[a];
                d2 += d * d;
            }
            dist += lambda.weight(i) * d2;
        }
        rep.f_gap.push_back(fgap);
        rep.grad_dist.push_back(dist);

        if (mode == ConvexityMode::Lipschitz) {
            // audit the competitor map x - grad phi^c over atom pairs
            double worst = 0.0;
            for (std::size_t i = 0; i + 1 < K; ++i) {
                std::size_t j = i + 1;
                double dx = 0.0, dT = 0.0;
                for (int a = 0; a < dim; ++a) {
                    double ddx = lambda.point(i)[a] - lambda.point(j)[a];
                    double ddT = mu.point(t1[i])[a] - mu.point(t1[j])[a];
                    dx += ddx * ddx;
                    dT += ddT * ddT;
                }
                if (dx > 0) worst = std::max(worst, std::sqrt(dT / dx));
            }
            rep.lipschitz_k = std::max(rep.lipschitz_k, worst);
            if (k_lipschitz > 0 && worst > k_lipschitz * 1.05)
                throw std::runtime_error("competitor-not-lipschitz");
        }
    }

    Fit fit = log_log_fit(rep.grad_dist, rep.f_gap);
    rep.fitted_exponent = fit.slope;
    rep.fitted_constant = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.f_gap.size(); ++i) {
        double d = rep.grad_dist[i];
        if (d <= 0) continue;
        double denom = mode == ConvexityMode::Cubic ? d * d * d : d;
        rep.fitted_constant =
            std::min(rep.fitted_constant, rep.f_gap[i] / denom);
    }
    return rep;
}

} // namespace otlab
