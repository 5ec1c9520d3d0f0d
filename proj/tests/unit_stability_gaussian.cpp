#include <doctest.h>

#include <cmath>
#include <vector>

#include "otlab/gaussian.hpp"
#include "otlab/measures.hpp"
#include "otlab/ot.hpp"
#include "otlab/rng.hpp"
#include "otlab/stability.hpp"

using namespace otlab;

namespace {

GridMeasure uniform_interval(double lo, double hi, double h) {
    int n = int(std::round((hi - lo) / h));
    GridSpec spec({lo}, h, {n});
    return GridMeasure(spec, std::vector<double>(n, 1.0)).normalized();
}

} // namespace

TEST_CASE("cone minima are 1-Lipschitz by construction") {
    Rng rng(21);
    GridSpec spec({0.0, 0.0}, 1.0 / 32, {32, 32});
    for (int t = 0; t < 5; ++t) {
        LipschitzFunction f =
            LipschitzFunction::random_cones(2, 2 + t, {0.0, 0.0}, {1.0, 1.0}, rng);
        CHECK(f.lipschitz_audit(spec) <= 1.0 + 10.0 * spec.h);
    }
}

TEST_CASE("fold configuration reproduces the sharp closed forms") {
    for (double e : {0.05, 0.1, 0.2}) {
        double h = e / 100.0;
        GridMeasure lambda = uniform_interval(0.0, 1.0, h);
        GridMeasure mu = uniform_interval(1.0, 2.0, h);
        GridSpec grid({0.0}, h, {int(std::round(2.0 / h))});
        ScalarField psi(grid, 0.0);
        for (std::size_t i = 0; i < grid.cell_count(); ++i)
            psi[i] = grid.center(i)[0];
        LipschitzFunction fold;
        fold.dim = 1;
        fold.apex = {e};
        fold.offset = {-e};
        ScalarField phi = fold.sample(grid);

        double w1 = wp_1d(lower_to_discrete(lambda), lower_to_discrete(mu),
                          {1.0, true});
        CHECK(w1 == doctest::Approx(1.0));
        CHECK(grad_l1_distance(psi, phi, lambda) ==
              doctest::Approx(2.0 * e).epsilon(0.02));
        CHECK(kantorovich_gap(psi, phi, lambda, mu, w1) ==
              doctest::Approx(e * e).epsilon(0.02));
    }
}

TEST_CASE("potential extension is 1-Lipschitz and exact on the atoms") {
    double h = 1.0 / 64;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    GridMeasure mu = uniform_interval(1.5, 2.5, h);
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    TransportSolution sol = solve(dl, dm, {1.0, true});
    GridSpec grid({0.0}, h, {int(std::round(2.5 / h))});
    ScalarField ext = extend_potential_1lip(sol.psi, dm, grid);
    for (std::size_t j = 0; j < dm.size(); ++j) {
        std::size_t cell = grid.locate(dm.point(j));
        CHECK(ext[cell] == doctest::Approx(sol.psi[j]).epsilon(1e-9));
    }
    // adjacent-cell differences never exceed the unit slope
    for (std::size_t i = 0; i + 1 < grid.cell_count(); ++i)
        CHECK(std::abs(ext[i + 1] - ext[i]) <= h + 1e-12);
}

TEST_CASE("thm1 family: gaps are nonnegative and the trivial trial is tight") {
    GridMeasure lambda = uniform_interval(0.0, 1.0, 1.0 / 64);
    GridMeasure mu = uniform_interval(1.5, 2.5, 1.0 / 64);
    StabilityReport rep = thm1_family_check(lambda, mu, 7, 20, 3.5);
    REQUIRE(!rep.rhs.empty());
    for (double g : rep.rhs) CHECK(g >= -1e-8);
    // trial 0 uses phi = psi: both sides vanish
    CHECK(std::abs(rep.rhs[0]) <= 1e-8);
    CHECK(std::abs(rep.lhs[0]) <= 1e-6);
    CHECK(rep.w1 == doctest::Approx(1.5));
}

TEST_CASE("quadratic convexity: gaps nonnegative, distances tracked") {
    Rng rng(31);
    std::vector<double> pts, w;
    for (int i = 0; i < 12; ++i) {
        pts.push_back(rng.uniform(0.0, 1.0));
        w.push_back(rng.uniform(0.2, 1.0));
    }
    std::vector<double> qts, v;
    for (int i = 0; i < 10; ++i) {
        qts.push_back(rng.uniform(2.0, 3.0));
        v.push_back(rng.uniform(0.2, 1.0));
    }
    DiscreteMeasure lambda = DiscreteMeasure(1, pts, w).normalized();
    DiscreteMeasure mu = DiscreteMeasure(1, qts, v).normalized();
    ConvexityReport rep =
        quadratic_convexity_check(lambda, mu, 8, 5, ConvexityMode::Cubic);
    REQUIRE(rep.f_gap.size() == 8);
    for (std::size_t i = 0; i < rep.f_gap.size(); ++i) {
        CHECK(rep.f_gap[i] >= -1e-10); // optimality of the unperturbed dual
        CHECK(rep.grad_dist[i] >= 0.0);
    }
    CHECK(std::isfinite(rep.fitted_exponent));
}

TEST_CASE("gaussian closed forms and the internal identity") {
    GaussianDeficit g = delta_eps_gaussian_closed_form(2.0, 0.04, 1);
    double se = std::sqrt(1.4), ke = std::sqrt(4.4);
    CHECK(g.f == doctest::Approx(1.0 - 9.0 / ((se + ke) * (se + ke))).epsilon(1e-12));
    CHECK(g.f == doctest::Approx(0.16387).epsilon(1e-4));
    CHECK(g.delta == doctest::Approx(g.f * 1.0).epsilon(1e-12));

    GaussianDeficit zero = delta_eps_gaussian_closed_form(2.0, 0.0, 1);
    CHECK(zero.delta == doctest::Approx(0.0));
    CHECK(zero.f == doctest::Approx(0.0));

    // kappa large with eps fixed: f tends to 0
    CHECK(delta_eps_gaussian_closed_form(1e4, 0.04, 1).f ==
          doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("heat step, log-concavity step, Caffarelli bound") {
    IsotropicGaussian g{1, 1.0, {0.0}};
    CHECK(heat_step(g, 0.2).s == doctest::Approx(std::sqrt(1.4)));
    IsotropicGaussian two = heat_step(heat_step(g, 0.1), 0.3);
    CHECK(two.s == doctest::Approx(heat_step(g, 0.4).s)); // semigroup
    CHECK(log_concavity_step(1.0, 0.2) == doctest::Approx(1.4));
    CHECK(caffarelli_bound(2.0, 2.0) == doctest::Approx(1.0));

    // empirical Lipschitz constant of the 1D quantile map stays within 5%
    DiscretizedGaussian a = discretize_gaussian_1d({1, 1.0, {0.0}}, -8.0, 8.0, 0.01);
    DiscretizedGaussian b = discretize_gaussian_1d({1, 0.5, {0.0}}, -8.0, 8.0, 0.01);
    DiscreteMeasure da = lower_to_discrete(a.measure);
    DiscreteMeasure db = lower_to_discrete(b.measure);
    TransportSolution sol = wp_1d_plan(da, db, {2.0, false});
    // difference quotients of the monotone map along the plan
    double prev_x = 0, prev_y = 0, worst = 0;
    bool first = true;
    for (const PlanArc& arc : sol.plan) {
        double x = da.point(arc.source)[0], y = db.point(arc.target)[0];
        if (!first && x > prev_x + 1e-12)
            worst = std::max(worst, (y - prev_y) / (x - prev_x));
        prev_x = x;
        prev_y = y;
        first = false;
    }
    // target inverse-convexity kappa = 1/sigma_b^2 wait: bound = sqrt(kappa/Sigma)
    double bound = caffarelli_bound(0.5 * 0.5, 1.0);
    CHECK(worst <= bound * 1.05);
}

TEST_CASE("gaussian discretization tracks the closed-form W2") {
    double h = 5e-3;
    for (double kappa : {0.5, 2.0}) {
        double half = 8.0 * std::max(1.0, kappa);
        DiscretizedGaussian a = discretize_gaussian_1d({1, 1.0, {0.0}}, -half, half, h);
        DiscretizedGaussian b =
            discretize_gaussian_1d({1, kappa, {0.0}}, -half, half, h);
        CHECK(a.truncated_mass <= 1e-6);
        double w2 = wp_1d(lower_to_discrete(a.measure), lower_to_discrete(b.measure),
                          {2.0, false});
        double closed = w2_gaussians({1, 1.0, {0.0}}, {1, kappa, {0.0}});
        CHECK(w2 == doctest::Approx(closed).epsilon(0.01));
    }
}

TEST_CASE("stabgauss guards its domain") {
    CHECK_THROWS(stabgauss_experiment(0.1, 0.04, 8.0, 5e-3));
    CHECK_THROWS(stabgauss_experiment(2.0, 0.04, 4.0, 5e-3));
}
