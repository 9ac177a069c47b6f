#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "sobtrace/isoperimetry.hpp"

using namespace sobtrace;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const GridDomain> grid(DomainPtr dom, double h) {
    return std::make_shared<const GridDomain>(rasterize(std::move(dom), h));
}

GridSet where(std::shared_ptr<const GridDomain> gd, const std::function<bool(const Point&)>& pred) {
    GridSet E(gd);
    for (std::size_t c : gd->inside_cells)
        if (pred(gd->center(c))) E.set(c, true);
    return E;
}

// Brute-force face count: every pair of face-adjacent inside cells with exactly one in E.
double faces_oracle(const GridSet& E) {
    const auto& g = E.parent();
    long faces = 0;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const std::size_t c = g.index(i, j, k);
                if (!g.inside[c]) continue;
                const int nb[3][3] = {{i + 1, j, k}, {i, j + 1, k}, {i, j, k + 1}};
                for (int a = 0; a < g.dim; ++a) {
                    if (nb[a][a] >= g.n[a]) continue;
                    const std::size_t d = g.index(nb[a][0], nb[a][1], nb[a][2]);
                    if (g.inside[d] && E.contains(c) != E.contains(d)) ++faces;
                }
            }
    return faces * std::pow(g.h, g.dim - 1);
}

GridSet random_set(std::shared_ptr<const GridDomain> gd, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double cx = U(rng) * 2 - 1, cy = U(rng) * 2 - 1, r = U(rng);
    const double density = U(rng);
    const bool blob = rng() % 2 == 0;
    GridSet E(gd);
    for (std::size_t c : gd->inside_cells) {
        const auto x = gd->center(c);
        const bool in = blob ? std::hypot(x[0] - cx, x[1] - cy) < r : U(rng) < density;
        if (in) E.set(c, true);
    }
    return E;
}

}  // namespace

TEST_CASE("grid perimeter examples") {
    const auto gd = grid(unit_cube(2), 1.0 / 128);
    CHECK(grid_perimeter(where(gd, [](const Point& x) { return x[0] < 0.5; })) == 1.0);
    CHECK(grid_perimeter(where(gd, [](const Point&) { return true; })) == 0.0);
    CHECK(grid_perimeter(GridSet(gd)) == 0.0);

    const double a = 0.375, t = 0.1;
    const auto q = grid(rectangle(a), 1.0 / 256);
    const auto strip = where(q, [&](const Point& x) { return x[0] < t / a; });
    CHECK(grid_perimeter(strip) == doctest::Approx(a));

    const auto c3 = grid(unit_cube(3), 1.0 / 16);
    CHECK(grid_perimeter(where(c3, [](const Point& x) { return x[2] < 0.25; })) == doctest::Approx(1.0));
}

TEST_CASE("property: face counting matches a brute-force oracle") {
    std::mt19937_64 rng(41);
    const auto gd = grid(crocodile(4), 1.0 / 64);
    for (int i = 0; i < 50; ++i) {
        const auto E = random_set(gd, rng);
        CHECK(grid_perimeter(E) == doctest::Approx(faces_oracle(E)).epsilon(1e-15));
        CHECK(E.measure() == doctest::Approx(E.count() * gd->cell_measure()));
    }
}

TEST_CASE("rectangle profile") {
    auto r = rectangle_profile(0.5, 1.0 / (4.0 * kPi));
    CHECK(r.psi == doctest::Approx(0.5));
    r = rectangle_profile(0.5, 0.25);
    CHECK(r.lower_bound == doctest::Approx(0.5));
    CHECK(r.psi == doctest::Approx(0.5));
    CHECK_FALSE(r.quarter_disc);
    r = rectangle_profile(0.5, 0.0);
    CHECK(r.lower_bound == 0.0);
    CHECK(r.psi == 0.0);
    CHECK_THROWS_AS(rectangle_profile(0.5, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(rectangle_profile(1.5, 0.1), std::invalid_argument);

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double a = 0.01 + 0.98 * U(rng);
        const double s = 0.5 * a * (0.001 + 0.998 * U(rng));
        const auto p = rectangle_profile(a, s);
        CHECK(p.lower_bound < p.psi);
    }
}

TEST_CASE("rooms witness") {
    const auto w = rooms_passages_witness(std::ldexp(kPi, -6));
    CHECK(w.k == 3);
    CHECK(w.cut_width == std::ldexp(1.0, -8));
    CHECK(w.perimeter == std::ldexp(1.0L, -8));
    CHECK(w.within_bound);

    const auto w2 = rooms_passages_witness(std::nextafter(kPi / 16.0, 0.0));
    CHECK(w2.k == 2);
    CHECK(w2.perimeter == std::ldexp(1.0L, -4));

    for (int j = 6; j <= 60; ++j) {
        const double s = kPi * std::exp2(-j * 0.7);
        const auto x = rooms_passages_witness(s);
        CHECK(x.perimeter / (static_cast<long double>(s) * s) <= 256.0L / (kPi * kPi));
        CHECK(x.room_measure >= s);
        CHECK(x.room_measure < 4.0 * s);
    }
    CHECK_THROWS_AS(rooms_passages_witness(0.0), std::invalid_argument);
    CHECK_THROWS_AS(rooms_passages_witness(kPi / 16.0 * (1 + 1e-12)), std::invalid_argument);
}

TEST_CASE("skyscraper bound") {
    CHECK(skyscraper_profile_bound(0.5) == doctest::Approx(0.5 / std::sqrt(2.0)));
    CHECK_THROWS_AS(skyscraper_profile_bound(1.2), std::invalid_argument);
    CHECK(skyscrapers_measure(3) == doctest::Approx(2.0 + 1.0 / 16 + 1.0 / 32 + 1.0 / 64));
}

TEST_CASE("profile search") {
    const double h = std::ldexp(1.0, -8);
    SUBCASE("rectangle strip") {
        const auto q = grid(rectangle(0.5), h);
        const auto pp = profile_search(q, 0.125);
        CHECK(pp.witness_perimeter <= 0.5 + 4 * h);
        CHECK(pp.witness_measure >= 0.125);
        REQUIRE(pp.analytic_bound);
        CHECK(*pp.analytic_bound == doctest::Approx(std::sqrt(2 * 0.5 * 0.125)));
        CHECK_FALSE(pp.bound_violated);
    }
    SUBCASE("skyscrapers") {
        const auto g = grid(skyscrapers(6), h);
        const auto pp = profile_search(g, 0.5);
        CHECK(pp.witness_perimeter >= 0.5 / std::sqrt(2.0) - 4 * h);
        CHECK(pp.witness->measure() >= 0.5);
    }
    SUBCASE("rooms via the registered witness") {
        const auto g = grid(rooms_and_passages(6), h);
        const auto pp = profile_search(g, std::ldexp(kPi, -6));
        CHECK(pp.witness_perimeter <= std::ldexp(1.0, -8) + 4 * h);
    }
    SUBCASE("infeasible levels") {
        const auto g = grid(unit_cube(2), 1.0 / 32);
        CHECK_THROWS_AS(profile_search(g, 0.75), std::invalid_argument);
        CHECK_THROWS_AS(profile_search(g, -0.1), std::invalid_argument);
    }
    SUBCASE("deterministic across thread counts") {
        const auto g = grid(crocodile(4), 1.0 / 64);
        const auto a = profile_search(g, 0.3);
        setenv("SOBTRACE_THREADS", "1", 1);
        const auto b = profile_search(g, 0.3);
        unsetenv("SOBTRACE_THREADS");
        CHECK(a.witness_perimeter == b.witness_perimeter);
        CHECK(a.witness->member() == b.witness->member());
    }
    SUBCASE("reflection") {
        const auto g = grid(unit_cube(2), 1.0 / 32);
        const auto pp = profile_search_reflected(g, 0.8);
        CHECK(pp.witness_perimeter == doctest::Approx(profile_search(g, 0.2).witness_perimeter));
    }
}

TEST_CASE("profile search respects registered bounds and the square-root ceiling") {
    const double h = std::ldexp(1.0, -7);
    for (const auto& dom : {rectangle(0.5), skyscrapers(5)}) {
        const auto g = grid(dom, h);
        double c_max = 0.0;
        for (int j = 4; j <= 10; ++j) {
            const double s = std::ldexp(1.0, -j);
            const auto pp = profile_search(g, s, {40, 4});
            CHECK_FALSE(pp.bound_violated);
            c_max = std::max(c_max, pp.witness_perimeter / std::sqrt(s));
        }
        CHECK(c_max <= 4.0);
    }
}

TEST_CASE("superadditivity") {
    const auto g = grid(skyscrapers(5), std::ldexp(1.0, -7));
    const auto parts = grid_part_ids(*g);
    const auto all = where(g, [](const Point&) { return true; });
    auto [l, r] = superadditivity_check(all, parts);
    CHECK(l == 0.0);
    CHECK(r == 0.0);

    const auto interior = where(g, [](const Point& x) { return std::hypot(x[0] + 0.3, x[1] + 0.5) < 0.3; });
    std::tie(l, r) = superadditivity_check(interior, parts);
    CHECK(l == r);
    CHECK(l > 0.0);

    std::mt19937_64 rng(43);
    for (int i = 0; i < 200; ++i) {
        const auto E = random_set(g, rng);
        std::tie(l, r) = superadditivity_check(E, parts);
        CHECK(l >= r);
        const auto full = perimeter_faces(E);
        for (int part = 0; part < g->domain->part_count(); ++part)
            for (const auto& f : perimeter_faces(E, &parts, part))
                CHECK(std::binary_search(full.begin(), full.end(), f));
    }
}
