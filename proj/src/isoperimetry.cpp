#include "sobtrace/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "sobtrace/parallel.hpp"
#include "sobtrace/rearrangement.hpp"

namespace sobtrace {

namespace {

constexpr double kPi = std::numbers::pi;

struct Candidate {
    std::vector<std::uint8_t> member;
    std::size_t count = 0;
    long faces = 0;
    std::string source;
};

// Faces between member cells and inside non-member cells.
long count_faces(const GridDomain& gd, const std::vector<std::uint8_t>& member) {
    long faces = 0;
    for (std::size_t c : gd.inside_cells) {
        if (!member[c]) continue;
        for (int a = 0; a < gd.dim; ++a)
            for (int dir : {-1, 1}) {
                const long nb = gd.neighbor(c, a, dir);
                if (gd.is_inside(nb) && !member[static_cast<std::size_t>(nb)]) ++faces;
            }
    }
    return faces;
}

// Inside neighbours and member neighbours of a cell.
void neighbour_counts(const GridDomain& gd, const std::vector<std::uint8_t>& member, std::size_t c, int& k_in,
                      int& m) {
    k_in = 0;
    m = 0;
    for (int a = 0; a < gd.dim; ++a)
        for (int dir : {-1, 1}) {
            const long nb = gd.neighbor(c, a, dir);
            if (!gd.is_inside(nb)) continue;
            ++k_in;
            if (member[static_cast<std::size_t>(nb)]) ++m;
        }
}

void local_search(const GridDomain& gd, Candidate& cand, std::size_t count_min, std::size_t count_max, int passes) {
    for (int pass = 0; pass < passes; ++pass) {
        bool changed = false;
        for (std::size_t c : gd.inside_cells) {
            int k_in, m;
            if (cand.member[c]) {
                if (cand.count <= count_min) continue;
                neighbour_counts(gd, cand.member, c, k_in, m);
                const int delta = 2 * m - k_in;
                if (delta < 0) {
                    cand.member[c] = 0;
                    --cand.count;
                    cand.faces += delta;
                    changed = true;
                }
            } else {
                if (cand.count >= count_max) continue;
                neighbour_counts(gd, cand.member, c, k_in, m);
                if (m == 0) continue;
                const int delta = k_in - 2 * m;
                if (delta < 0) {
                    cand.member[c] = 1;
                    ++cand.count;
                    cand.faces += delta;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
}

Candidate prefix_candidate(const GridDomain& gd, const std::vector<std::size_t>& order, std::size_t count,
                           std::string source) {
    Candidate c;
    c.member.assign(gd.cell_count(), 0);
    for (std::size_t i = 0; i < count && i < order.size(); ++i) c.member[order[i]] = 1;
    c.count = std::min(count, order.size());
    c.source = std::move(source);
    return c;
}

bool lex_less(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

GridSet::GridSet(std::shared_ptr<const GridDomain> parent) : parent_(std::move(parent)) {
    member_.assign(parent_->cell_count(), 0);
}

GridSet::GridSet(std::shared_ptr<const GridDomain> parent, std::vector<std::uint8_t> member)
    : parent_(std::move(parent)), member_(std::move(member)) {
    if (member_.size() != parent_->cell_count()) throw std::invalid_argument("GridSet: membership size mismatch");
    for (std::size_t c = 0; c < member_.size(); ++c) {
        if (!member_[c]) continue;
        if (!parent_->inside[c]) throw std::invalid_argument("GridSet: cell outside the domain");
        ++count_;
    }
}

void GridSet::set(std::size_t cell, bool on) {
    if (on && !parent_->inside[cell]) throw std::invalid_argument("GridSet: cell outside the domain");
    if (on && !member_[cell]) ++count_;
    if (!on && member_[cell]) --count_;
    member_[cell] = on ? 1 : 0;
}

double GridSet::measure() const { return count_ * parent_->cell_measure(); }

double grid_perimeter(const GridSet& E) {
    const auto& gd = E.parent();
    return count_faces(gd, E.member()) * std::pow(gd.h, gd.dim - 1);
}

double grid_perimeter_in_part(const GridSet& E, const std::vector<int>& part_ids, int part) {
    const auto& gd = E.parent();
    long faces = 0;
    for (std::size_t c : gd.inside_cells) {
        if (!E.contains(c) || part_ids[c] != part) continue;
        for (int a = 0; a < gd.dim; ++a)
            for (int dir : {-1, 1}) {
                const long nb = gd.neighbor(c, a, dir);
                if (gd.is_inside(nb) && part_ids[nb] == part && !E.contains(static_cast<std::size_t>(nb))) ++faces;
            }
    }
    return faces * std::pow(gd.h, gd.dim - 1);
}

std::vector<int> grid_part_ids(const GridDomain& gd) {
    std::vector<int> ids(gd.cell_count(), -1);
    for (std::size_t c : gd.inside_cells) ids[c] = gd.domain->part_of(gd.center(c));
    return ids;
}

std::vector<std::pair<std::size_t, int>> perimeter_faces(const GridSet& E, const std::vector<int>* part_ids,
                                                         int part) {
    const auto& gd = E.parent();
    std::vector<std::pair<std::size_t, int>> faces;
    for (std::size_t c : gd.inside_cells) {
        if (!E.contains(c)) continue;
        if (part_ids && (*part_ids)[c] != part) continue;
        for (int a = 0; a < gd.dim; ++a)
            for (int dir : {-1, 1}) {
                const long nb = gd.neighbor(c, a, dir);
                if (!gd.is_inside(nb) || E.contains(static_cast<std::size_t>(nb))) continue;
                if (part_ids && (*part_ids)[nb] != part) continue;
                faces.emplace_back(std::min<std::size_t>(c, static_cast<std::size_t>(nb)), a);
            }
    }
    std::sort(faces.begin(), faces.end());
    return faces;
}

std::pair<double, double> superadditivity_check(const GridSet& E, const std::vector<int>& part_ids) {
    const auto& gd = E.parent();
    long lhs = 0, rhs = 0;
    for (std::size_t c : gd.inside_cells) {
        if (!E.contains(c)) continue;
        for (int a = 0; a < gd.dim; ++a)
            for (int dir : {-1, 1}) {
                const long nb = gd.neighbor(c, a, dir);
                if (!gd.is_inside(nb) || E.contains(static_cast<std::size_t>(nb))) continue;
                ++lhs;
                if (part_ids[c] >= 0 && part_ids[c] == part_ids[nb]) ++rhs;
            }
    }
    const double face = std::pow(gd.h, gd.dim - 1);
    return {lhs * face, rhs * face};
}

RectangleProfile rectangle_profile(double a, double s) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("rectangle_profile: a must lie in (0,1)");
    if (!(s >= 0.0 && s <= 0.5 * a)) throw std::invalid_argument("rectangle_profile: s must lie in [0, a/2]");
    RectangleProfile r;
    r.lower_bound = std::sqrt(2.0 * a * s);
    if (s <= a * a / kPi) {
        r.psi = std::sqrt(kPi * s);
        r.quarter_disc = true;
        r.witness_extent = std::sqrt(4.0 * s / kPi);
    } else {
        r.psi = a;
        r.quarter_disc = false;
        r.witness_extent = s / a;
    }
    return r;
}

double skyscrapers_measure(int k_max) {
    double m = 2.0;
    for (int k = 1; k <= k_max; ++k) m += std::ldexp(1.0, -k - 3);
    return m;
}

double skyscraper_profile_bound(double s, int k_max) {
    if (!(s >= 0.0 && s < 0.5 * skyscrapers_measure(k_max)))
        throw std::invalid_argument("skyscraper_profile_bound: s must lie in [0, lambda/2)");
    return s / std::sqrt(2.0);
}

RoomsWitness rooms_passages_witness(double s) {
    const long double pi = std::numbers::pi_v<long double>;
    if (!(s > 0.0) || !(static_cast<long double>(s) < pi / 16.0L))
        throw std::invalid_argument("rooms_passages_witness: s must lie in (0, pi/16)");
    const long double ls = s;
    int k = static_cast<int>(std::floor(std::log(pi / ls) / std::log(4.0L)));
    auto room = [&](int j) { return pi * std::ldexp(1.0L, -2 * j); };
    while (ls > room(k)) --k;
    while (!(ls > room(k + 1))) ++k;
    RoomsWitness w;
    w.k = k;
    w.room_measure = static_cast<double>(room(k));
    w.cut_width = std::ldexp(1.0, -4 * (k - 1));
    w.perimeter = std::ldexp(1.0L, -4 * (k - 1));
    w.bound = 256.0L * ls * ls / (pi * pi);
    w.within_bound = w.perimeter <= w.bound;
    w.description = "rooms " + std::to_string(k) + ".. with their passages, cut across passage " +
                    std::to_string(k - 1) + " of width 2^-" + std::to_string(4 * (k - 1));
    return w;
}

std::optional<double> analytic_profile_lower_bound(const Domain& dom, double s) {
    if (dom.tag() == "rectangle") {
        const double a = dom.params().value("a", 0.5);
        if (s >= 0.0 && s <= 0.5 * a) return rectangle_profile(a, s).lower_bound;
    }
    if (dom.tag() == "skyscrapers") {
        if (s >= 0.0 && s < 0.5 * skyscrapers_measure(dom.k_max())) return skyscraper_profile_bound(s, dom.k_max());
    }
    return std::nullopt;
}

ProfilePoint profile_search(std::shared_ptr<const GridDomain> gdp, double s, const ProfileBudget& budget) {
    const GridDomain& gd = *gdp;
    const double cell = gd.cell_measure();
    const std::size_t n_inside = gd.inside_cells.size();
    const std::size_t count_max = n_inside / 2;
    if (!(s >= 0.0) || s > 0.5 * gd.grid_measure + 1e-12)
        throw std::invalid_argument("profile_search: s must lie in [0, grid measure / 2]");
    const std::size_t count_min = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s / cell - 1e-9)));
    if (count_min > count_max) throw std::invalid_argument("profile_search: s is infeasible on this grid");

    std::vector<Candidate> seeds;
    // Axis prefixes in both directions.
    for (int axis = 0; axis < gd.dim; ++axis)
        for (int dir : {1, -1}) {
            std::vector<std::size_t> order = gd.inside_cells;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                int cx[3], cy[3];
                gd.unindex(x, cx[0], cx[1], cx[2]);
                gd.unindex(y, cy[0], cy[1], cy[2]);
                if (cx[axis] != cy[axis]) return dir > 0 ? cx[axis] < cy[axis] : cx[axis] > cy[axis];
                return false;
            });
            seeds.push_back(prefix_candidate(gd, order, count_min,
                                             "strip axis " + std::to_string(axis) + (dir > 0 ? "+" : "-")));
        }
    // Distance-ordered prefixes around bounding-box corners and boundary vertices.
    {
        std::vector<Point> centres;
        const Box box = gd.domain->bbox();
        for (int mask = 0; mask < (1 << gd.dim); ++mask) {
            Point p(gd.dim);
            for (int a = 0; a < gd.dim; ++a) p[a] = (mask >> a) & 1 ? box.hi[a] : box.lo[a];
            centres.push_back(p);
        }
        const auto verts = gd.domain->boundary_samples(0);
        const int extra = std::min<int>(budget.distance_seeds, static_cast<int>(verts.size()));
        for (int i = 0; i < extra; ++i) centres.push_back(verts[(i * verts.size()) / extra]);
        for (const auto& ctr : centres) {
            if (static_cast<int>(ctr.size()) != gd.dim) continue;
            std::vector<std::pair<double, std::size_t>> keyed;
            keyed.reserve(n_inside);
            for (std::size_t c : gd.inside_cells) {
                const Point x = gd.center(c);
                double d2 = 0.0;
                for (int a = 0; a < gd.dim; ++a) d2 += (x[a] - ctr[a]) * (x[a] - ctr[a]);
                keyed.emplace_back(d2, c);
            }
            std::sort(keyed.begin(), keyed.end());
            std::vector<std::size_t> order(keyed.size());
            for (std::size_t i = 0; i < keyed.size(); ++i) order[i] = keyed[i].second;
            seeds.push_back(prefix_candidate(gd, order, count_min, "disc around boundary point"));
        }
    }
    // Single parts and tail unions of parts.
    if (gd.domain->part_count() > 1) {
        const auto ids = grid_part_ids(gd);
        const int parts = gd.domain->part_count();
        std::vector<std::size_t> sizes(parts, 0);
        for (std::size_t c : gd.inside_cells)
            if (ids[c] >= 0) ++sizes[ids[c]];
        for (int p = 0; p < parts; ++p) {
            for (bool tail : {false, true}) {
                Candidate cand;
                cand.member.assign(gd.cell_count(), 0);
                for (std::size_t c : gd.inside_cells)
                    if (tail ? ids[c] >= p : ids[c] == p) {
                        cand.member[c] = 1;
                        ++cand.count;
                    }
                if (cand.count >= count_min && cand.count <= count_max) {
                    cand.source = (tail ? "parts from " : "part ") + std::to_string(p);
                    seeds.push_back(std::move(cand));
                }
            }
        }
    }

    parallel_for(seeds.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            seeds[i].faces = count_faces(gd, seeds[i].member);
            local_search(gd, seeds[i], count_min, count_max, budget.max_passes);
            seeds[i].faces = count_faces(gd, seeds[i].member);
        }
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < seeds.size(); ++i) {
        if (seeds[i].faces < seeds[best].faces ||
            (seeds[i].faces == seeds[best].faces && lex_less(seeds[i].member, seeds[best].member)))
            best = i;
    }
    const double face = std::pow(gd.h, gd.dim - 1);
    ProfilePoint pt;
    pt.s = s;
    pt.grid_perimeter = seeds[best].faces * face;
    pt.witness_perimeter = pt.grid_perimeter;
    pt.witness_measure = seeds[best].count * cell;
    pt.witness_source = seeds[best].source;
    pt.witness = std::make_shared<GridSet>(gdp, std::move(seeds[best].member));

    const Domain& dom = *gd.domain;
    if (dom.tag() == "rectangle") {
        const double a = dom.params().value("a", 0.5);
        if (s <= 0.5 * a) {
            const auto rp = rectangle_profile(a, s);
            if (rp.psi < pt.witness_perimeter) {
                pt.witness_perimeter = rp.psi;
                pt.witness_measure = s;
                pt.witness_source = rp.quarter_disc ? "analytic quarter disc" : "analytic strip";
            }
        }
    }
    if (dom.tag() == "rooms_and_passages" && s > 0.0 && s < kPi / 16.0) {
        const auto w = rooms_passages_witness(s);
        if (static_cast<double>(w.perimeter) < pt.witness_perimeter) {
            pt.witness_perimeter = static_cast<double>(w.perimeter);
            pt.witness_measure = w.room_measure;
            pt.witness_source = "analytic rooms witness: " + w.description;
        }
    }
    pt.analytic_bound = analytic_profile_lower_bound(dom, s);
    if (pt.analytic_bound && pt.witness_perimeter < *pt.analytic_bound - 4.0 * gd.h) pt.bound_violated = true;
    return pt;
}

ProfilePoint profile_search_reflected(std::shared_ptr<const GridDomain> gd, double s, const ProfileBudget& budget) {
    const double lambda = gd->grid_measure;
    if (!(s >= 0.0 && s <= lambda)) throw std::invalid_argument("profile_search_reflected: s outside [0, lambda]");
    return profile_search(gd, s <= 0.5 * lambda ? s : lambda - s, budget);
}

}  // namespace sobtrace
