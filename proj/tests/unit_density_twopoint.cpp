#include <doctest.h>

#include <cmath>
#include <vector>

#include "otlab/measures.hpp"
#include "otlab/ot.hpp"
#include "otlab/rng.hpp"
#include "otlab/stability.hpp"
#include "otlab/transport_density.hpp"
#include "otlab/two_point.hpp"

using namespace otlab;

namespace {

GridMeasure uniform_interval(double lo, double hi, double h) {
    int n = int(std::round((hi - lo) / h));
    GridSpec spec({lo}, h, {n});
    return GridMeasure(spec, std::vector<double>(n, 1.0)).normalized();
}

} // namespace

TEST_CASE("1D transport density equals the CDF difference") {
    double h = 1.0 / 128;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    GridMeasure mu = uniform_interval(1.5, 2.5, h);
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    TransportSolution sol = solve(dl, dm, {1.0, true});
    GridSpec hull({0.0}, h, {int(std::round(2.5 / h))});
    TransportDensity td = compute_sigma(sol, dl, dm, hull);

    // sigma density: F_lambda - F_mu = x on [0,1], 1 on [1,1.5], 2.5-x after
    for (std::size_t i = 0; i < hull.cell_count(); ++i) {
        double x = hull.center(i)[0];
        double expect = x <= 1.0 ? x : (x <= 1.5 ? 1.0 : 2.5 - x);
        CHECK(std::abs(td.sigma.weight(i) / h - expect) <= 2.0 * h);
    }
    // mass identity: <sigma, 1> = sum of arc mass * length = W1
    CHECK(td.sigma.total_mass() == doctest::Approx(sol.cost).epsilon(1e-9));
    // gradient on the support is the unit ray direction (rightward)
    for (std::size_t i = 0; i < hull.cell_count(); ++i)
        if (td.sigma.weight(i) > 0)
            CHECK(td.cell_direction(i)[0] == doctest::Approx(1.0));
}

TEST_CASE("sigma covers the lambda support when supports are disjoint") {
    double h = 1.0 / 64;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    GridMeasure mu = uniform_interval(2.0, 3.0, h);
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    TransportSolution sol = solve(dl, dm, {1.0, true});
    GridSpec hull({0.0}, h, {int(std::round(3.0 / h))});
    TransportDensity td = compute_sigma(sol, dl, dm, hull);
    CHECK(support_inclusion(lambda, td) == 0.0);
}

TEST_CASE("identical measures give the zero transport density") {
    double h = 1.0 / 32;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    DiscreteMeasure dl = lower_to_discrete(lambda);
    TransportSolution sol = solve(dl, dl, {1.0, true});
    TransportDensity td = compute_sigma(sol, dl, dl, lambda.spec());
    CHECK(td.sigma.total_mass() == doctest::Approx(0.0));
}

TEST_CASE("Renyi bound constants match the printed formulas") {
    // X = [0,1], alpha = 5/4, R = 2, m = M = 1:
    // beta = 1/4, c1 = 2beta/(1-2beta) n + 1 = 2, c2 = (2R+1)^{2beta} = sqrt 5,
    // I_{1/2}([0,1]) = 2 sqrt 2, bound = 4 ln(2 + sqrt5 * 2 sqrt2)
    GridSpec spec({0.0}, 1.0 / 4096, {4096});
    Mask mask(spec, std::vector<std::uint8_t>(4096, 1));
    double bound = renyi_bound(mask, 1.25, 2.0, 1.0, 1.0);
    double exact = 4.0 * std::log(2.0 + std::sqrt(5.0) * 2.0 * std::sqrt(2.0));
    CHECK(bound == doctest::Approx(exact).epsilon(0.01));
    CHECK(bound == doctest::Approx(8.4776).epsilon(0.01));
    CHECK_THROWS_WITH(renyi_bound(mask, 1.6, 2.0, 1.0, 1.0),
                      doctest::Contains("alpha-out-of-range"));
    // density bounds shift the bound by (alpha/beta) ln M - ln m
    double shifted = renyi_bound(mask, 1.25, 2.0, 0.5, 2.0);
    CHECK(shifted == doctest::Approx(exact + 5.0 * std::log(2.0) +
                                     std::log(2.0)).epsilon(0.01));
}

TEST_CASE("Renyi divergence is finite iff sigma covers lambda") {
    double h = 1.0 / 64;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    GridMeasure mu = uniform_interval(1.5, 2.5, h);
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    TransportSolution sol = solve(dl, dm, {1.0, true});
    GridSpec hull({0.0}, h, {int(std::round(2.5 / h))});
    TransportDensity td = compute_sigma(sol, dl, dm, hull);

    // project lambda onto the hull grid for a shared-spec divergence
    std::vector<double> w(hull.cell_count(), 0.0);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        auto x = lambda.spec().center(i);
        w[hull.locate(x.data())] += lambda.weight(i);
    }
    GridMeasure lam(hull, std::move(w));
    double d = renyi(lam, td, 1.25);
    CHECK(std::isfinite(d));

    // zero sigma where lambda charges mass gives +infinity
    TransportDensity empty{GridMeasure(hull, std::vector<double>(hull.cell_count(), 0.0)),
                           std::vector<double>(hull.cell_count(), 0.0), ""};
    CHECK(std::isinf(renyi(lam, empty, 1.25)));
}

TEST_CASE("stab-sigma inequality with explicit constant 2") {
    double e = 0.1, h = e / 200;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    GridMeasure mu = uniform_interval(1.0, 2.0, h);
    DiscreteMeasure dl = lower_to_discrete(lambda), dm = lower_to_discrete(mu);
    TransportSolution sol = solve(dl, dm, {1.0, true});
    GridSpec grid({0.0}, h, {int(std::round(2.0 / h))});
    TransportDensity td = compute_sigma(sol, dl, dm, grid);

    ScalarField psi(grid, 0.0);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) psi[i] = grid.center(i)[0];

    SUBCASE("fold competitor attains equality") {
        LipschitzFunction fold;
        fold.dim = 1;
        fold.apex = {e};
        fold.offset = {-e};
        StabSigmaResult res = stab_sigma_check(psi, fold.sample(grid), td, lambda, mu);
        CHECK(res.slack >= -1e-6);
        CHECK(res.lhs == doctest::Approx(2.0 * e * e).epsilon(0.01));
        CHECK(res.rhs == doctest::Approx(2.0 * e * e).epsilon(0.01));
    }
    SUBCASE("phi = psi gives zero on both sides") {
        StabSigmaResult res = stab_sigma_check(psi, psi, td, lambda, mu);
        CHECK(std::abs(res.lhs) <= 1e-10);
        CHECK(std::abs(res.rhs) <= 1e-8);
    }
    SUBCASE("steep competitors are rejected") {
        ScalarField steep(grid, 0.0);
        for (std::size_t i = 0; i < grid.cell_count(); ++i)
            steep[i] = 3.0 * grid.center(i)[0];
        CHECK_THROWS_WITH(stab_sigma_check(psi, steep, td, lambda, mu),
                          doctest::Contains("not-1-lipschitz"));
    }
}

TEST_CASE("Lambda_eps of matching linear fields is the kernel variance term") {
    // xi(y) = y, f(x) = x, p = 2, uniform kernel on [-eps, eps]:
    // Lambda = int |u|^2 / (2 eps) du = eps^2 / 3 for any lambda
    double e = 0.2, h = 1.0 / 256;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    const GridSpec& spec = lambda.spec();
    ScalarField f(spec, 0.0);
    DisplacementField xi;
    xi.dim = 1;
    xi.p = 2.0;
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
        double x = spec.center(i)[0];
        f[i] = x;
        xi.base.push_back(x);
        xi.xi.push_back(x);
        xi.base_mass.push_back(lambda.weight(i));
        xi.defined.push_back(1);
    }
    double L = lambda_eps(xi, {f}, Kernel{KernelProfile::UniformBall, e}, 2.0);
    CHECK(L == doctest::Approx(e * e / 3.0).epsilon(0.05));
}

TEST_CASE("grid graph on a uniform interval is a connected chain") {
    double h = 1.0 / 128;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    GridGraph g = build_grid_graph(lambda, 0.1, 0.25, {0.0});
    CHECK(g.connected);
    CHECK(g.size() > 10);
    double m = m0(g, lambda);
    CHECK(std::isfinite(m));
    CHECK(m >= 1.0);
    // interior overlap ratio for spacing eta r within balls of radius r:
    // 2r / (2r - eta r) = 1/(1 - eta/2), edges slightly worse
    CHECK(m <= 1.0 / (1.0 - 0.25 / 2.0) + 0.5);

    ChainTable chains = build_chains(g, Rng(3));
    CHECK(chains.exhaustive);
    CHECK(chains.kappa_geo >= 1.0 - 1e-9);
    TauResult t = tau(g, chains, 2.0);
    CHECK(t.tau > 0.0);
    CHECK(t.pairs_used == chains.pairs.size());
}

TEST_CASE("empty support is rejected by name") {
    GridSpec spec({0.0}, 0.25, {4});
    GridMeasure zero(spec, std::vector<double>(4, 0.0));
    CHECK_THROWS_WITH(build_grid_graph(zero, 0.5, 0.25, {0.0}),
                      doctest::Contains("empty-support"));
}

TEST_CASE("two-point bound holds and vanishes with Lambda_eps") {
    double h = 1.0 / 64;
    GridMeasure lambda = uniform_interval(0.0, 1.0, h);
    const GridSpec& spec = lambda.spec();
    Kernel k{KernelProfile::UniformBall, 0.1};

    // constant displacement: Lambda_eps = 0 and the deviation side vanishes
    ScalarField f(spec, 0.7);
    DisplacementField xi;
    xi.dim = 1;
    xi.p = 2.0;
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
        xi.base.push_back(spec.center(i)[0]);
        xi.xi.push_back(0.7);
        xi.base_mass.push_back(lambda.weight(i));
        xi.defined.push_back(1);
    }
    TwoPointResult res = two_point_check(lambda, xi, {f}, k, 0.2, 0.25, 2.0, Rng(9));
    CHECK(res.lambda_eps_value <= 1e-12);
    CHECK(res.lhs <= 1e-8);
}

TEST_CASE("nonlocal Poincare ratio is order one on smooth data") {
    GridSpec spec({0.0}, 1.0 / 128, {128});
    Mask mask(spec, std::vector<std::uint8_t>(128, 1));
    ScalarField f(spec, 0.0);
    for (std::size_t i = 0; i < spec.cell_count(); ++i)
        f[i] = std::sin(2.0 * 3.14159265358979 * spec.center(i)[0]);
    PoincareResult res = nonlocal_poincare(f, mask, Kernel{KernelProfile::UniformBall, 0.1}, 2.0);
    CHECK(res.lhs > 0.0);
    CHECK(res.rhs > 0.0);
    CHECK(std::isfinite(res.ratio));
}
