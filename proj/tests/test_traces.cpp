#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "sobtrace/traces.hpp"

using namespace sobtrace;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const GridDomain> grid(DomainPtr dom, double h) {
    return std::make_shared<const GridDomain>(rasterize(std::move(dom), h));
}

std::vector<int> dyadic_ks(int kmax) {
    std::vector<int> ks;
    for (int k = 1; k <= kmax; k *= 2) ks.push_back(k);
    return ks;
}

// Average of |f| over the closed lattice ball of radius j cells around c; cells off the grid or outside count as zero.
double brute_ball_average(const GridFunction& f, std::size_t c, int j) {
    const auto& g = *f.parent;
    int ci, cj, ck;
    g.unindex(c, ci, cj, ck);
    double sum = 0.0;
    long count = 0;
    for (int dj = -j; dj <= j; ++dj)
        for (int di = -j; di <= j; ++di) {
            if (di * di + dj * dj > j * j) continue;
            ++count;
            const int ii = ci + di, jj = cj + dj;
            if (ii < 0 || jj < 0 || ii >= g.n[0] || jj >= g.n[1]) continue;
            const std::size_t d = g.index(ii, jj, 0);
            if (g.inside[d]) sum += std::abs(f.values[d]);
        }
    return sum / static_cast<double>(count);
}

}  // namespace

TEST_CASE("gradients") {
    const auto g = grid(unit_cube(2), 1.0 / 64);
    const auto x = make_grid_function(g, [](const Point& p) { return p[0]; });
    const auto gx = gradient_magnitude(x);
    for (std::size_t c : g->inside_cells) CHECK(gx.values[c] == doctest::Approx(1.0));

    const auto c5 = make_grid_function(g, [](const Point&) { return 5.0; });
    for (std::size_t c : g->inside_cells) CHECK(gradient_magnitude(c5).values[c] == 0.0);

    const auto d = make_field(g, "d");
    const auto gd = gradient_magnitude(d);
    for (std::size_t c : g->inside_cells) {
        const auto p = g->center(c);
        if (std::abs(p[0] - p[1]) > 2 * g->h && std::abs(p[0] + p[1] - 1) > 2 * g->h)
            CHECK(gd.values[c] == doctest::Approx(1.0));
    }
}

TEST_CASE("Sobolev norms") {
    const auto sq = grid(unit_cube(2), 1.0 / 128);
    auto n = sobolev_norm(make_field(sq, "one"), 2.0);
    CHECK(n.lp == doctest::Approx(1.0));
    CHECK(n.grad_lp == 0.0);
    CHECK(n.w1p == doctest::Approx(1.0));

    const double h = 1.0 / 1024;
    const auto line = grid(unit_cube(1), h);
    n = sobolev_norm(make_grid_function(line, [](const Point& p) { return p[0]; }), 2.0);
    CHECK(n.lp == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
    CHECK(n.grad_lp == doctest::Approx(1.0));
    CHECK(n.w1p == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-6));

    // Pyramid integral: int_{(0,1)^2} d = 1/6.
    const double l1 = lp_norm(make_field(sq, "d"), 1.0);
    CHECK(std::abs(l1 - 1.0 / 6.0) <= sq->h);

    const auto s = make_grid_function(sq, [](const Point& p) { return std::sin(kPi * p[0]) * std::sin(kPi * p[1]); });
    n = sobolev_norm(s, 2.0);
    CHECK(n.lp == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(n.grad_lp == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-2));
    CHECK(n.w1p == doctest::Approx(std::sqrt(0.25 + kPi * kPi / 2.0)).epsilon(1e-2));

    CHECK_THROWS_AS(sobolev_norm(s, 0.5), std::invalid_argument);
}

TEST_CASE("distance truncation") {
    const auto sq = grid(unit_cube(2), 1.0 / 128);
    const auto big = distance_truncation(sq, 0.6, 2.0);
    for (std::size_t c : sq->inside_cells) CHECK(big.d_eta.values[c] == 0.0);
    CHECK(big.residual == doctest::Approx(lp_norm(make_field(sq, "d"), 2.0)));
    const auto zero = distance_truncation(sq, 0.0, 1.0);
    CHECK(zero.residual == 0.0);
    const auto mid = distance_truncation(sq, 0.1, 1.0);
    CHECK(mid.residual <= 0.1);
    CHECK(mid.within_bound);
    CHECK_THROWS_AS(distance_truncation(sq, -0.1, 1.0), std::invalid_argument);
}

TEST_CASE("approximation scheme") {
    const auto sq = grid(unit_cube(2), 1.0 / 256);
    const auto ks = dyadic_ks(1024);

    SUBCASE("u = d needs no truncation") {
        const auto rep = approximation_scheme(make_field(sq, "d"), 2.0, ks);
        for (const auto& row : rep.approx_residuals) {
            CHECK(row.measure_Ek == 0.0);
            CHECK(row.res_w1p == 0.0);
        }
    }
    SUBCASE("u = 1 on the square") {
        const auto dom = unit_cube(2);
        const auto rep = approximation_scheme(make_field(sq, "one"), 1.0, ks, closed_form_ratio_distribution(*dom, "one"));
        CHECK(rep.verdict == TraceVerdict::INCONSISTENT);
        CHECK(rep.ac.verdict == ACVerdict::AC_VIOLATED_AT_INFINITY);
        for (const auto& row : rep.approx_residuals) {
            const double k = row.k;
            const double want = k >= 2 ? 1.0 - std::pow(1.0 - 2.0 / k, 2) : 1.0;
            CHECK(row.measure_Ek == doctest::Approx(want).epsilon(0.02));
        }
        CHECK(rep.approx_residuals.back().k_mu_pow == doctest::Approx(4.0).epsilon(0.01));
        const auto j = nlohmann::json::parse(to_json(rep));
        CHECK(j["verdict"] == "INCONSISTENT");
        CHECK(j["approx_residuals"].size() == ks.size());
        std::ostringstream csv;
        write_residuals_csv(csv, rep);
        CHECK(csv.str().rfind("k,res_w1p,measure_Ek,k_mu_pow\n", 0) == 0);
    }
    SUBCASE("smooth multiple of d") {
        const auto rep = approximation_scheme(make_field(sq, "bump"), 2.0, ks);
        CHECK(rep.verdict == TraceVerdict::CONSISTENT_WITH_ZERO_TRACE);
        CHECK(rep.approx_residuals.back().k_mu_pow * 100.0 <= rep.approx_residuals.front().k_mu_pow);
    }
    SUBCASE("punctured disc at p = 3: AC holds at p = 1 yet k mu^(1/3) grows") {
        const auto ball = grid(punctured_ball(2), 1.0 / 128);
        const auto rep = approximation_scheme(make_field(ball, "hardy_ratio"), 3.0, dyadic_ks(64),
                                              closed_form_ratio_distribution(*ball->domain, "hardy_ratio"));
        CHECK(rep.ac.verdict == ACVerdict::AC_CONSISTENT);
        CHECK(rep.trend_persists);
        CHECK(rep.verdict == TraceVerdict::INCONSISTENT);
        const auto& rows = rep.approx_residuals;
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].k_mu_pow > rows[i - 1].k_mu_pow);
    }
    SUBCASE("argument errors") {
        CHECK_THROWS_AS(approximation_scheme(make_field(sq, "one"), 1.0, {0, 1}), std::invalid_argument);
        CHECK_THROWS_AS(approximation_scheme(make_field(sq, "one"), 1.0, {}), std::invalid_argument);
        const auto neg = make_grid_function(sq, [](const Point& p) { return p[0] - 0.5; });
        CHECK_THROWS_AS(approximation_scheme(neg, 1.0, {1}), std::invalid_argument);
        const auto [pos, minus] = split_signed(neg);
        for (std::size_t c : sq->inside_cells) CHECK(pos.values[c] - minus.values[c] == neg.values[c]);
        CHECK_NOTHROW(approximation_scheme(pos, 1.0, {1, 2}));
    }
}

TEST_CASE("ratio fields") {
    const auto sq = grid(unit_cube(2), 1.0 / 256);
    const auto rd = ratio_field(make_field(sq, "d"));
    CHECK(rd.ratio.sup() == doctest::Approx(1.0));
    CHECK(lorentz_quasinorm_rearranged(rd.ratio, {1.0, kInf}) == doctest::Approx(1.0));
    const auto r1 = ratio_field(make_field(sq, "one"));
    CHECK(weak_norm_estimate(r1.ratio, 1.0, r1.xi_cap) == doctest::Approx(4.0).epsilon(0.02));
    CHECK(r1.near_boundary_measure == doctest::Approx(1.0 - std::pow(1.0 - 4.0 / 256, 2)));

    const auto ball = grid(punctured_ball(2), 1.0 / 256);
    const auto rb = ratio_field(make_field(ball, "hardy_ratio"));
    CHECK(distribution(rb.ratio, 2.0) == doctest::Approx(kPi / 9.0).epsilon(0.01));
    CHECK_FALSE(closed_form_ratio_distribution(*crocodile(), "one").has_value());
    CHECK_THROWS_AS(make_field(sq, "nope"), std::invalid_argument);
}

TEST_CASE("maximal operator") {
    const auto sq = grid(unit_cube(2), 1.0 / 32);
    const auto c = make_grid_function(sq, [](const Point&) { return 3.0; });
    const auto m = maximal_operator(c, 0.125);
    for (std::size_t i : sq->inside_cells) {
        if (sq->dist[i] > 0.125) CHECK(m.values[i] == doctest::Approx(3.0));
        CHECK(m.values[i] <= 3.0 + 1e-12);
    }

    const auto left = make_grid_function(sq, [](const Point& p) { return p[0] < 0.5 ? 1.0 : 0.0; });
    const auto ml = maximal_operator(left, 0.1);
    CHECK(ml.values[sq->index(28, 16)] == 0.0);

    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto f = make_grid_function(sq, [&](const Point&) { return U(rng); });
    const auto m1 = maximal_operator(f, 2.0 / 32), m2 = maximal_operator(f, 5.0 / 32);
    for (std::size_t i : sq->inside_cells) CHECK(m1.values[i] <= m2.values[i]);
    for (int t = 0; t < 20; ++t) {
        const std::size_t cell = sq->inside_cells[rng() % sq->inside_cells.size()];
        double best = 0.0;
        for (int j = 1; j <= 5; ++j) best = std::max(best, brute_ball_average(f, cell, j));
        CHECK(m2.values[cell] == doctest::Approx(best).epsilon(1e-12));
    }
    CHECK_THROWS_AS(maximal_operator(f, 0.0), std::invalid_argument);
}

TEST_CASE("pointwise Hardy constant") {
    const auto sq = grid(unit_cube(2), 1.0 / 256);
    const auto hd = hardy_pointwise_check(make_field(sq, "d"));
    CHECK(hd.cells_evaluated > 0);
    CHECK(std::isfinite(hd.worst_constant));
    CHECK(hd.worst_constant <= 4.0);

    const auto z = hardy_pointwise_check(make_grid_function(sq, [](const Point&) { return 0.0; }));
    CHECK(z.worst_constant == 0.0);
    CHECK(z.cells_evaluated == 0);

    const double coarse = hardy_pointwise_check(make_field(grid(unit_cube(2), 1.0 / 32), "bump"), 1.0).worst_constant;
    const double fine = hardy_pointwise_check(make_field(grid(unit_cube(2), 1.0 / 64), "bump"), 1.0).worst_constant;
    CHECK(coarse > 0.0);
    CHECK(std::abs(fine - coarse) <= 0.2 * fine);

    CHECK_THROWS_AS(hardy_pointwise_check(make_field(sq, "one")), std::invalid_argument);
}

TEST_CASE("one-dimensional traces") {
    auto r = oned_zero_trace([](double x) { return x * (1 - x); }, 0.0, 1.0, 2.0);
    CHECK(std::abs(r.limit_a) < 1e-8);
    CHECK(std::abs(r.limit_b) < 1e-8);
    CHECK(r.zero_trace);

    r = oned_zero_trace([](double) { return 1.0; }, 0.0, 1.0, 2.0);
    CHECK(r.limit_a == doctest::Approx(1.0));
    CHECK(r.limit_b == doctest::Approx(1.0));
    CHECK_FALSE(r.zero_trace);
    CHECK(r.sup_bound_holds);

    r = oned_zero_trace([](double x) { return x; }, 0.0, 1.0, 2.0);
    CHECK(r.sup_abs == doctest::Approx(1.0));
    CHECK(r.w1p == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-6));
    CHECK(r.sup_bound_holds);

    // sqrt vanishes at 0 with an unbounded derivative: the trace is still 0 there.
    r = oned_zero_trace([](double x) { return std::sqrt(x) * (1 - x); }, 0.0, 1.0, 1.0);
    CHECK(r.zero_trace);

    r = oned_zero_trace([](double x) { return std::sin(x); }, 0.0, 3.0, 2.0);
    CHECK(r.sup_constant == doctest::Approx(std::pow(3.0, -0.5) * 3.0));
    CHECK_FALSE(r.zero_trace);

    CHECK_THROWS_AS(oned_zero_trace([](double) { return 0.0; }, 1.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(oned_zero_trace([](double) { return 0.0; }, 0.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("one-dimensional sup bound: stated constant fails on a tilted constant") {
    // u = 1 + 0.1 x on (0,1), p = 2: sup = 1.1 while ||u||_{W^{1,2}} = sqrt(1.1 + 0.01/3 + 0.01) = 1.0551.
    const auto r = oned_zero_trace([](double x) { return 1.0 + 0.1 * x; }, 0.0, 1.0, 2.0);
    CHECK(r.w1p == doctest::Approx(std::sqrt(1.1 + 0.01 / 3.0 + 0.01)).epsilon(1e-6));
    CHECK_FALSE(r.sup_bound_holds);
    CHECK(r.triangle_bound_holds);
}
