#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "otlab/discrete.hpp"
#include "otlab/grid.hpp"
#include "otlab/kernel.hpp"
#include "otlab/measures.hpp"
#include "otlab/rng.hpp"

using namespace otlab;

TEST_CASE("grid indexing round-trips") {
    GridSpec spec({-1.0, 0.5}, 0.25, {7, 5});
    CHECK(spec.cell_count() == 35);
    for (std::size_t i = 0; i < spec.cell_count(); ++i)
        CHECK(spec.flatten(spec.unflatten(i)) == i);
    // center of the first cell is origin + h/2 per axis
    auto c = spec.center(0);
    CHECK(c[0] == doctest::Approx(-0.875));
    CHECK(c[1] == doctest::Approx(0.625));
    // locate maps centers back to their own cell
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
        auto x = spec.center(i);
        CHECK(spec.locate(x.data()) == i);
    }
    double outside[2] = {5.0, 5.0};
    CHECK(spec.locate(outside) == GridSpec::npos);
}

TEST_CASE("grid measure mass, normalization, serialization") {
    GridSpec spec({0.0}, 0.5, {4});
    GridMeasure m(spec, {1.0, 2.0, 3.0, 4.0});
    CHECK(m.total_mass() == doctest::Approx(10.0));
    GridMeasure p = m.normalized();
    CHECK(p.is_probability());
    CHECK(p.mean()[0] == doctest::Approx(0.25 + 0.5 * (0.1 * 0 + 0.2 * 1 + 0.3 * 2 + 0.4 * 3)));

    std::string path = (std::filesystem::temp_directory_path() / "m.grid").string();
    p.save(path);
    GridMeasure q = GridMeasure::load(path);
    CHECK(q.spec() == p.spec());
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(q.weight(i) == p.weight(i)); // exact round-trip
    std::remove(path.c_str());
}

TEST_CASE("grid measure rejects bad weights and oversized grids") {
    GridSpec spec({0.0}, 1.0, {2});
    CHECK_THROWS(GridMeasure(spec, {1.0, -0.5}));
    CHECK_THROWS_WITH(GridSpec({0.0, 0.0}, 1e-4, {3000, 3000}),
                      doctest::Contains("grid-budget"));
}

TEST_CASE("discrete measures and lowering") {
    GridSpec spec({0.0}, 0.5, {4});
    GridMeasure m(spec, {0.0, 2.0, 0.0, 3.0});
    DiscreteMeasure d = lower_to_discrete(m);
    CHECK(d.size() == 2); // zero-mass cells dropped
    CHECK(d.total_mass() == doctest::Approx(5.0));
    CHECK(d.point(0)[0] == doctest::Approx(0.75));
    CHECK(d.point(1)[0] == doctest::Approx(1.75));

    DiscreteMeasure dup(1, {0.3, 0.1, 0.3}, {1.0, 1.0, 2.0});
    DiscreteMeasure s = sorted_1d(dup);
    CHECK(s.size() == 2); // equal positions merged
    CHECK(s.point(0)[0] == doctest::Approx(0.1));
    CHECK(s.weight(1) == doctest::Approx(3.0));
}

TEST_CASE("rng streams are reproducible and fork independently") {
    Rng a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng f1 = Rng(42).fork(1), f2 = Rng(42).fork(2);
    CHECK(f1.next_u64() != f2.next_u64());
    Rng u(7);
    for (int i = 0; i < 1000; ++i) {
        double x = u.uniform(2.0, 3.0);
        CHECK(x >= 2.0);
        CHECK(x < 3.0);
    }
}

TEST_CASE("discretized kernels are normalized and resolve eps >= h") {
    for (auto profile : {KernelProfile::UniformBall, KernelProfile::Tent,
                         KernelProfile::Gauss}) {
        Kernel k{profile, 0.1};
        for (int dim : {1, 2}) {
            DiscretizedKernel dk = discretize(k, dim, 0.02);
            double total = 0.0;
            for (double w : dk.weights) total += w;
            CHECK(total == doctest::Approx(1.0));
        }
    }
    CHECK_THROWS_WITH(discretize(Kernel{KernelProfile::UniformBall, 0.01}, 1, 0.1),
                      doctest::Contains("kernel-under-resolved"));
}

TEST_CASE("convolution preserves mass and spreads support") {
    GridSpec spec({0.0, 0.0}, 1.0 / 16, {16, 16});
    std::vector<double> w(spec.cell_count(), 0.0);
    w[spec.flatten({8, 8})] = 1.0;
    GridMeasure m(spec, std::move(w));
    GridMeasure c = convolve(m, Kernel{KernelProfile::UniformBall, 0.1});
    CHECK(c.total_mass() == doctest::Approx(1.0));
    int positive = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.weight(i) > 0) ++positive;
    CHECK(positive > 1);
}

TEST_CASE("translation moves weights bit-identically") {
    GridSpec spec({0.0}, 0.25, {4});
    GridMeasure m(spec, {0.1, 0.2, 0.3, 0.4});
    GridTranslation t = translate(m, {0.5});
    CHECK(t.residual[0] == doctest::Approx(0.0));
    for (std::size_t i = 0; i < m.size(); ++i)
        CHECK(t.measure.weight(i) == m.weight(i));
    CHECK(t.measure.spec().origin[0] == doctest::Approx(0.5));
}

TEST_CASE("projection pushes forward along a direction") {
    GridSpec spec({0.0, 0.0}, 0.5, {2, 2});
    GridMeasure m(spec, {1.0, 1.0, 1.0, 1.0});
    DiscreteMeasure p = project(m, {1.0, 0.0});
    CHECK(p.total_mass() == doctest::Approx(4.0));
    // both columns collapse onto two distinct scalar positions
    DiscreteMeasure s = sorted_1d(p);
    CHECK(s.size() == 2);
    CHECK(s.point(0)[0] == doctest::Approx(0.25));
    CHECK(s.point(1)[0] == doctest::Approx(0.75));
}

TEST_CASE("distance transform on an interval is distance to the endpoints") {
    GridSpec spec({0.0}, 1.0 / 64, {64});
    Mask mask(spec, std::vector<std::uint8_t>(64, 1));
    ScalarField d = distance_transform(mask);
    for (std::size_t i = 0; i < 64; ++i) {
        double x = spec.center(i)[0];
        double expect = std::max(std::min(x, 1.0 - x), spec.h / 2);
        CHECK(d[i] == doctest::Approx(expect).epsilon(0.05));
    }
}

TEST_CASE("erosion integral matches the unit-interval closed form") {
    // integral over [0,1] of min(x, 1-x)^(-1/2) dx = 2 sqrt(2)
    GridSpec spec({0.0}, 1.0 / 4096, {4096});
    Mask mask(spec, std::vector<std::uint8_t>(4096, 1));
    double I = erosion_integral(mask, 0.5);
    CHECK(I == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("stochastic dominance detects CDF ordering") {
    DiscreteMeasure a(1, {0.0, 1.0}, {0.5, 0.5});
    DiscreteMeasure b(1, {0.5, 1.5}, {0.5, 0.5});
    CHECK(stochastic_dominance_1d(a, b).dominated);
    CHECK_FALSE(stochastic_dominance_1d(b, a).dominated);
    CHECK(stochastic_dominance_1d(a, a).dominated); // ties allowed
}
