#include "sobtrace/traces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "sobtrace/parallel.hpp"

namespace sobtrace {

namespace {

double pnorm_sum(const GridFunction& u, double p, const std::vector<double>& vals) {
    const auto& gd = *u.parent;
    double s = 0.0;
    for (std::size_t c : gd.inside_cells) s += std::pow(std::abs(vals[c]), p);
    return s * gd.cell_measure();
}

void require_parent(const GridFunction& u) {
    if (!u.parent) throw std::invalid_argument("grid function has no parent grid");
    if (u.values.size() != u.parent->cell_count()) throw std::invalid_argument("grid function size mismatch");
}

}  // namespace

GridFunction make_grid_function(std::shared_ptr<const GridDomain> gd, const std::function<double(const Point&)>& f,
                                std::string label) {
    GridFunction u{gd, std::vector<double>(gd->cell_count(), 0.0), std::move(label)};
    for (std::size_t c : gd->inside_cells) {
        const double v = f(gd->center(c));
        if (!std::isfinite(v)) throw std::invalid_argument("grid function value is not finite");
        u.values[c] = v;
    }
    return u;
}

GridFunction make_grid_function_with_distance(std::shared_ptr<const GridDomain> gd,
                                              const std::function<double(const Point&, double)>& f,
                                              std::string label) {
    GridFunction u{gd, std::vector<double>(gd->cell_count(), 0.0), std::move(label)};
    for (std::size_t c : gd->inside_cells) {
        const double v = f(gd->center(c), gd->dist[c]);
        if (!std::isfinite(v)) throw std::invalid_argument("grid function value is not finite");
        u.values[c] = v;
    }
    return u;
}

GridFunction make_field(std::shared_ptr<const GridDomain> gd, const std::string& field) {
    if (field == "one" || field == "inv_d") return make_grid_function(gd, [](const Point&) { return 1.0; }, field);
    if (field == "d") return make_grid_function_with_distance(gd, [](const Point&, double d) { return d; }, field);
    if (field == "hardy_ratio") {
        // Same norm expression as the punctured-ball distance, so u/d is exactly 1 on the outer annulus.
        return make_grid_function(gd, [](const Point& x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return 1.0 - std::sqrt(s);
        }, field);
    }
    if (field == "bump") {
        const Box box = gd->domain->bbox();
        Point c(gd->dim);
        double rho = 1e300;
        for (int a = 0; a < gd->dim; ++a) {
            c[a] = 0.5 * (box.lo[a] + box.hi[a]);
            rho = std::min(rho, 0.25 * (box.hi[a] - box.lo[a]));
        }
        return make_grid_function_with_distance(gd, [c, rho](const Point& x, double d) {
            double s = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
            return 2.5 * std::max(0.0, 1.0 - s / (rho * rho)) * d;
        }, field);
    }
    throw std::invalid_argument("unknown field '" + field + "'");
}

std::optional<ClosedFormDistribution> closed_form_ratio_distribution(const Domain& dom, const std::string& field) {
    const std::string tag = dom.tag();
    const int N = dom.dim();
    if ((field == "one" || field == "inv_d") && tag.rfind("cube", 0) == 0) {
        ClosedFormDistribution d;
        d.total_measure = 1.0;
        d.mu = [N](double xi) {
            if (xi <= 2.0) return 1.0;
            return -std::expm1(N * std::log1p(-2.0 / xi));
        };
        d.label = "1/d on the unit cube";
        return d;
    }
    if (field == "hardy_ratio" && tag.rfind("punctured_ball", 0) == 0) {
        const double omega = std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0 + 1.0);
        ClosedFormDistribution d;
        d.total_measure = omega;
        d.mu = [N, omega](double xi) {
            if (xi < 1.0) return omega;
            return omega * std::pow(1.0 / (xi + 1.0), N);
        };
        d.jumps = {1.0};
        d.label = "(1-|x|)/d on the punctured ball";
        return d;
    }
    if (field == "d") {
        const auto m = dom.exact_measure();
        if (!m) return std::nullopt;
        ClosedFormDistribution d;
        d.total_measure = *m;
        const double mm = *m;
        d.mu = [mm](double xi) { return xi < 1.0 ? mm : 0.0; };
        d.jumps = {1.0};
        d.label = "d/d";
        return d;
    }
    return std::nullopt;
}

std::vector<GridFunction> partial_derivatives(const GridFunction& u) {
    require_parent(u);
    const auto& gd = *u.parent;
    std::vector<GridFunction> out;
    for (int a = 0; a < gd.dim; ++a) {
        GridFunction g{u.parent, std::vector<double>(gd.cell_count(), 0.0), "d" + std::to_string(a) + " " + u.label};
        for (std::size_t c : gd.inside_cells) {
            const long lo = gd.neighbor(c, a, -1), hi = gd.neighbor(c, a, +1);
            const bool has_lo = gd.is_inside(lo), has_hi = gd.is_inside(hi);
            if (has_lo && has_hi)
                g.values[c] = (u.values[hi] - u.values[lo]) / (2.0 * gd.h);
            else if (has_hi)
                g.values[c] = (u.values[hi] - u.values[c]) / gd.h;
            else if (has_lo)
                g.values[c] = (u.values[c] - u.values[lo]) / gd.h;
        }
        out.push_back(std::move(g));
    }
    return out;
}

GridFunction gradient_magnitude(const GridFunction& u) {
    const auto parts = partial_derivatives(u);
    GridFunction g{u.parent, std::vector<double>(u.parent->cell_count(), 0.0), "|grad " + u.label + "|"};
    for (std::size_t c : u.parent->inside_cells) {
        double s = 0.0;
        for (const auto& d : parts) s += d.values[c] * d.values[c];
        g.values[c] = std::sqrt(s);
    }
    return g;
}

double lp_norm(const GridFunction& u, double p) {
    require_parent(u);
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    return std::pow(pnorm_sum(u, p, u.values), 1.0 / p);
}

SobolevNorm sobolev_norm(const GridFunction& u, double p) {
    require_parent(u);
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    SobolevNorm n;
    const double up = pnorm_sum(u, p, u.values);
    double total = up;
    for (const auto& d : partial_derivatives(u)) total += pnorm_sum(u, p, d.values);
    const auto g = gradient_magnitude(u);
    n.lp = std::pow(up, 1.0 / p);
    n.grad_lp = std::pow(pnorm_sum(u, p, g.values), 1.0 / p);
    n.w1p = std::pow(total, 1.0 / p);
    return n;
}

TruncationReport distance_truncation(std::shared_ptr<const GridDomain> gd, double eta, double p) {
    if (!(eta >= 0.0)) throw std::invalid_argument("distance_truncation: eta must be nonnegative");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    TruncationReport r;
    r.d_eta = make_grid_function_with_distance(gd, [eta](const Point&, double d) { return std::max(d - eta, 0.0); },
                                               "d_eta");
    GridFunction diff = make_grid_function_with_distance(gd, [eta](const Point&, double d) { return std::min(d, eta); },
                                                         "d - d_eta");
    r.residual = lp_norm(diff, p);
    r.bound = eta * std::pow(gd->grid_measure, 1.0 / p);
    r.within_bound = r.residual <= r.bound * (1.0 + 1e-12);
    return r;
}

std::pair<GridFunction, GridFunction> split_signed(const GridFunction& u) {
    require_parent(u);
    GridFunction pos{u.parent, u.values, u.label + "+"};
    GridFunction neg{u.parent, u.values, u.label + "-"};
    for (std::size_t c = 0; c < u.values.size(); ++c) {
        pos.values[c] = std::max(u.values[c], 0.0);
        neg.values[c] = std::max(-u.values[c], 0.0);
    }
    return {pos, neg};
}

RatioField ratio_field(const GridFunction& u) {
    require_parent(u);
    const auto& gd = *u.parent;
    std::vector<Sample> s;
    s.reserve(gd.inside_cells.size());
    RatioField rf;
    double sup_u = 0.0;
    const double cell = gd.cell_measure();
    for (std::size_t c : gd.inside_cells) {
        const double d = gd.dist[c];
        if (!(d > 0.0)) throw std::invalid_argument("ratio_field: nonpositive distance at an inside cell");
        s.push_back({std::abs(u.values[c]) / d, cell});
        sup_u = std::max(sup_u, std::abs(u.values[c]));
        if (d < 2.0 * gd.h) rf.near_boundary_measure += cell;
    }
    rf.ratio = SampledFunction(std::move(s), "|" + u.label + "|/d");
    rf.xi_cap = sup_u / (2.0 * gd.h);
    return rf;
}

std::string to_string(TraceVerdict v) {
    switch (v) {
        case TraceVerdict::CONSISTENT_WITH_ZERO_TRACE: return "CONSISTENT_WITH_ZERO_TRACE";
        case TraceVerdict::INCONSISTENT: return "INCONSISTENT";
        default: return "INCONCLUSIVE";
    }
}

DiagnosticReport approximation_scheme(const GridFunction& u, double p, const std::vector<int>& k_list,
                                      const std::optional<ClosedFormDistribution>& ratio_closed_form,
                                      const ProbeSpec& probes) {
    require_parent(u);
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (k_list.empty()) throw std::invalid_argument("approximation_scheme: empty k list");
    for (int k : k_list)
        if (k <= 0) throw std::invalid_argument("approximation_scheme: k must be positive");
    const auto& gd = *u.parent;
    double sup_u = 0.0;
    for (std::size_t c : gd.inside_cells) {
        if (u.values[c] < 0.0) throw std::invalid_argument("approximation_scheme: u must be nonnegative (split it first)");
        sup_u = std::max(sup_u, u.values[c]);
    }
    DiagnosticReport rep;
    rep.p = p;
    const auto rf = ratio_field(u);
    if (ratio_closed_form) {
        rep.ac = ac_diagnostic(*ratio_closed_form, 1.0, probes);
        rep.weak_norm = rep.ac.weak_norm;
        rep.notes.push_back("AC diagnostic from the closed-form distribution of u/d");
    } else {
        rep.ac = ac_diagnostic(rf.ratio, 1.0, probes, rf.xi_cap);
        rep.weak_norm = weak_norm_estimate(rf.ratio, 1.0, rf.xi_cap);
        rep.notes.push_back("AC diagnostic from grid samples, capped at xi = " + format_number(rf.xi_cap));
    }
    const auto grad = gradient_magnitude(u);
    rep.sobolev_seminorm = lp_norm(grad, p);

    for (int k : k_list) {
        ApproxRow row;
        row.k = k;
        GridFunction diff{u.parent, std::vector<double>(gd.cell_count(), 0.0), "u - u_k"};
        std::size_t in_e = 0;
        double grad_e = 0.0;
        for (std::size_t c : gd.inside_cells) {
            const double kd = k * gd.dist[c];
            if (u.values[c] > kd) {
                diff.values[c] = u.values[c] - kd;
                ++in_e;
                grad_e += std::pow(grad.values[c], p);
            }
        }
        const auto norms = sobolev_norm(diff, p);
        row.res_w1p = norms.w1p;
        row.res_lp = norms.lp;
        row.grad_on_Ek = std::pow(grad_e * gd.cell_measure(), 1.0 / p);
        row.measure_resolved = sup_u / k >= 2.0 * gd.h;
        if (!row.measure_resolved && ratio_closed_form) {
            row.measure_Ek = ratio_closed_form->mu(static_cast<double>(k));
            row.measure_from_closed_form = true;
        } else {
            row.measure_Ek = in_e * gd.cell_measure();
        }
        row.k_mu_pow = k * std::pow(row.measure_Ek, 1.0 / p);
        rep.approx_residuals.push_back(row);
    }

    std::vector<double> trend;
    for (const auto& r : rep.approx_residuals) trend.push_back(r.k_mu_pow);
    const double peak = *std::max_element(trend.begin(), trend.end());
    rep.trend_vanishes = peak == 0.0 || trend.back() <= 1e-2 * peak;
    if (!rep.trend_vanishes && trend.size() >= 3) {
        rep.trend_persists = true;
        for (std::size_t i = trend.size() - 2; i < trend.size(); ++i)
            if (trend[i] < 0.9 * trend[i - 1]) rep.trend_persists = false;
    }
    const bool ac_violated = rep.ac.verdict == ACVerdict::AC_VIOLATED_AT_INFINITY ||
                             rep.ac.verdict == ACVerdict::AC_VIOLATED_AT_ZERO;
    if (ac_violated || rep.trend_persists)
        rep.verdict = TraceVerdict::INCONSISTENT;
    else if (rep.ac.verdict == ACVerdict::AC_CONSISTENT && rep.trend_vanishes)
        rep.verdict = TraceVerdict::CONSISTENT_WITH_ZERO_TRACE;
    else
        rep.verdict = TraceVerdict::INCONCLUSIVE;
    return rep;
}

std::string to_json(const DiagnosticReport& r) {
    nlohmann::ordered_json j;
    j["p"] = r.p;
    j["weak_norm"] = r.weak_norm;
    j["ac"] = nlohmann::ordered_json::parse(to_json(r.ac));
    j["sobolev_seminorm"] = r.sobolev_seminorm;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.approx_residuals)
        rows.push_back({{"k", row.k},
                        {"res_w1p", row.res_w1p},
                        {"res_lp", row.res_lp},
                        {"measure_Ek", row.measure_Ek},
                        {"k_mu_pow", row.k_mu_pow},
                        {"grad_on_Ek", row.grad_on_Ek},
                        {"measure_resolved", row.measure_resolved},
                        {"measure_from_closed_form", row.measure_from_closed_form}});
    j["approx_residuals"] = rows;
    j["trend_vanishes"] = r.trend_vanishes;
    j["trend_persists"] = r.trend_persists;
    j["verdict"] = to_string(r.verdict);
    j["notes"] = r.notes;
    return j.dump(2);
}

void write_residuals_csv(std::ostream& out, const DiagnosticReport& r) {
    out << "k,res_w1p,measure_Ek,k_mu_pow\n";
    for (const auto& row : r.approx_residuals)
        out << row.k << ',' << format_number(row.res_w1p) << ',' << format_number(row.measure_Ek) << ','
            << format_number(row.k_mu_pow) << '\n';
}

namespace {

struct Offset {
    int d[3];
    long r2;
};

std::vector<Offset> ball_offsets(int dim, int rmax_cells) {
    std::vector<Offset> off;
    const int ry = dim > 1 ? rmax_cells : 0, rz = dim > 2 ? rmax_cells : 0;
    const long limit = static_cast<long>(rmax_cells) * rmax_cells;
    for (int z = -rz; z <= rz; ++z)
        for (int y = -ry; y <= ry; ++y)
            for (int x = -rmax_cells; x <= rmax_cells; ++x) {
                const long r2 = long(x) * x + long(y) * y + long(z) * z;
                if (r2 <= limit) off.push_back({{x, y, z}, r2});
            }
    std::stable_sort(off.begin(), off.end(), [](const Offset& a, const Offset& b) { return a.r2 < b.r2; });
    return off;
}

// sup over radii j h, j = 1..jmax, of the lattice-ball average of |f| around cell c.
double ball_sup(const GridDomain& gd, const std::vector<double>& f, std::size_t c, const std::vector<Offset>& off,
                int jmax) {
    int ci[3];
    gd.unindex(c, ci[0], ci[1], ci[2]);
    double sum = 0.0, best = 0.0;
    std::size_t count = 0, o = 0;
    for (int j = 1; j <= jmax; ++j) {
        const long lim = long(j) * j;
        while (o < off.size() && off[o].r2 <= lim) {
            int q[3] = {ci[0] + off[o].d[0], ci[1] + off[o].d[1], ci[2] + off[o].d[2]};
            bool in_grid = true;
            for (int a = 0; a < 3; ++a) in_grid = in_grid && q[a] >= 0 && q[a] < gd.n[a];
            if (in_grid) {
                const std::size_t qi = gd.index(q[0], q[1], q[2]);
                if (gd.inside[qi]) sum += std::abs(f[qi]);
            }
            ++count;
            ++o;
        }
        best = std::max(best, sum / static_cast<double>(count));
    }
    return best;
}

}  // namespace

GridFunction maximal_operator(const GridFunction& f, const std::vector<double>& R_per_cell) {
    require_parent(f);
    const auto& gd = *f.parent;
    if (R_per_cell.size() != gd.cell_count()) throw std::invalid_argument("maximal_operator: radius array size");
    double rmax = gd.h;
    for (std::size_t c : gd.inside_cells) rmax = std::max(rmax, R_per_cell[c]);
    const int jmax_all = std::max(1, static_cast<int>(std::floor(rmax / gd.h + 1e-9)));
    const auto off = ball_offsets(gd.dim, jmax_all);
    GridFunction m{f.parent, std::vector<double>(gd.cell_count(), 0.0), "M " + f.label};
    parallel_for(gd.inside_cells.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const std::size_t c = gd.inside_cells[i];
            const int jmax = std::max(1, static_cast<int>(std::floor(R_per_cell[c] / gd.h + 1e-9)));
            m.values[c] = ball_sup(gd, f.values, c, off, jmax);
        }
    });
    return m;
}

GridFunction maximal_operator(const GridFunction& f, double R) {
    require_parent(f);
    if (!(R > 0.0)) throw std::invalid_argument("maximal_operator: R must be positive");
    return maximal_operator(f, std::vector<double>(f.parent->cell_count(), R));
}

HardyResult hardy_pointwise_check(const GridFunction& u, double r0) {
    require_parent(u);
    const auto& gd = *u.parent;
    const auto grad = gradient_magnitude(u);
    double gmax = 0.0;
    for (std::size_t c : gd.inside_cells) gmax = std::max(gmax, grad.values[c]);
    for (std::size_t c : gd.inside_cells)
        if (gd.boundary_adjacent(c) && std::abs(u.values[c]) > gd.h * gmax + 1e-12)
            throw std::invalid_argument("hardy_pointwise_check: u does not vanish at the boundary cells");
    // With the chi_{B(x,d)} factor the supremum over r < 2d is reached at r <= d.
    std::vector<double> R(gd.cell_count(), 0.0);
    std::vector<std::size_t> cells;
    for (std::size_t c : gd.inside_cells)
        if (gd.dist[c] < r0) {
            R[c] = std::max(gd.h, gd.dist[c]);
            cells.push_back(c);
        }
    HardyResult res;
    if (cells.empty()) return res;
    double rmax = gd.h;
    for (std::size_t c : cells) rmax = std::max(rmax, R[c]);
    const auto off = ball_offsets(gd.dim, std::max(1, static_cast<int>(std::floor(rmax / gd.h + 1e-9))));
    std::vector<double> ratio(cells.size(), 0.0);
    std::vector<std::uint8_t> used(cells.size(), 0);
    parallel_for(cells.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const std::size_t c = cells[i];
            const double lhs = std::abs(u.values[c]) / gd.dist[c];
            if (lhs == 0.0) continue;
            const int jmax = std::max(1, static_cast<int>(std::floor(R[c] / gd.h + 1e-9)));
            const double m = ball_sup(gd, grad.values, c, off, jmax);
            ratio[i] = m > 0.0 ? lhs / m : kInf;
            used[i] = 1;
        }
    });
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (used[i]) {
            res.worst_constant = std::max(res.worst_constant, ratio[i]);
            ++res.cells_evaluated;
        }
    return res;
}

}  // namespace sobtrace
