#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "sobtrace/domains.hpp"
#include "sobtrace/parallel.hpp"
#include "sobtrace/rearrangement.hpp"

namespace sobtrace {

namespace {

// One-dimensional squared distance transform (Felzenszwalb-Huttenlocher).
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
    const double inf = std::numeric_limits<double>::infinity();
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == inf) continue;
        if (f[v[k]] == inf) {
            v[k] = q;
            continue;
        }
        double s;
        while (true) {
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * (q - v[k]));
            if (s <= z[k] && k > 0) {
                --k;
                continue;
            }
            break;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    if (f[v[0]] == inf) {
        for (int q = 0; q < n; ++q) d[q] = inf;
        return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

// Squared distance (in cell units) from every cell of a padded grid to the
// nearest source cell.
std::vector<double> squared_edt(const std::vector<std::uint8_t>& source, const int m[3], int dim) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t total = static_cast<std::size_t>(m[0]) * m[1] * m[2];
    std::vector<double> g(total);
    for (std::size_t i = 0; i < total; ++i) g[i] = source[i] ? 0.0 : inf;
    for (int axis = 0; axis < dim; ++axis) {
        const int len = m[axis];
        std::size_t stride = 1;
        for (int a = 0; a < axis; ++a) stride *= m[a];
        const std::size_t lines = total / len;
        parallel_for(lines, [&](std::size_t b, std::size_t e) {
            std::vector<double> f(len), d(len), z;
            std::vector<int> v;
            for (std::size_t line = b; line < e; ++line) {
                const std::size_t lo = line % stride;
                const std::size_t hi = line / stride;
                const std::size_t base = hi * stride * len + lo;
                for (int q = 0; q < len; ++q) f[q] = g[base + q * stride];
                edt_1d(f.data(), d.data(), len, v, z);
                for (int q = 0; q < len; ++q) g[base + q * stride] = d[q];
            }
        });
    }
    return g;
}

}  // namespace

double GridDomain::cell_measure() const { return std::pow(h, dim); }

void GridDomain::unindex(std::size_t idx, int& i, int& j, int& k) const {
    i = static_cast<int>(idx % n[0]);
    idx /= n[0];
    j = static_cast<int>(idx % n[1]);
    k = static_cast<int>(idx / n[1]);
}

Point GridDomain::center(std::size_t idx) const {
    int c[3];
    unindex(idx, c[0], c[1], c[2]);
    Point p(dim);
    for (int a = 0; a < dim; ++a) p[a] = origin[a] + (c[a] + 0.5) * h;
    return p;
}

long GridDomain::neighbor(std::size_t idx, int axis, int dir) const {
    int c[3];
    unindex(idx, c[0], c[1], c[2]);
    c[axis] += dir;
    if (c[axis] < 0 || c[axis] >= n[axis]) return -1;
    return static_cast<long>(index(c[0], c[1], c[2]));
}

bool GridDomain::boundary_adjacent(std::size_t idx) const {
    if (!inside[idx]) return false;
    for (int a = 0; a < dim; ++a)
        for (int dir : {-1, 1})
            if (!is_inside(neighbor(idx, a, dir))) return true;
    return false;
}

GridDomain rasterize(DomainPtr dom, double h, const RasterOptions& opts) {
    if (!dom) throw std::invalid_argument("rasterize: null domain");
    if (!(h > 0.0)) throw std::invalid_argument("rasterize: h must be positive");
    const int dim = dom->dim();
    if (dim < 1 || dim > 3) throw std::invalid_argument("rasterize supports dimensions 1 to 3");
    GridDomain gd;
    gd.domain = dom;
    gd.dim = dim;
    gd.h = h;
    gd.distance_mode = opts.distance;
    const Box box = dom->bbox();
    for (int a = 0; a < dim; ++a) {
        const double side = box.hi[a] - box.lo[a];
        const double cells = side / h;
        gd.n[a] = static_cast<int>(std::ceil(cells - 1e-9));
        if (std::abs(cells - std::round(cells)) > 1e-9) gd.h_adjusted = true;
        gd.origin[a] = box.lo[a];
    }
    if (gd.h_adjusted)
        gd.warnings.push_back("bounding box is not a multiple of h; grid extended past the upper sides");
    const std::size_t total = gd.cell_count();
    if (total > 200'000'000) throw std::invalid_argument("rasterize: grid too large");
    gd.inside.assign(total, 0);
    parallel_for(total, [&](std::size_t b, std::size_t e) {
        for (std::size_t idx = b; idx < e; ++idx) gd.inside[idx] = dom->inside(gd.center(idx)) ? 1 : 0;
    });

    if (opts.keep_largest_component) {
        std::vector<int> label(total, -1);
        std::vector<std::size_t> sizes;
        for (std::size_t s = 0; s < total; ++s) {
            if (!gd.inside[s] || label[s] >= 0) continue;
            const int id = static_cast<int>(sizes.size());
            std::size_t count = 0;
            std::queue<std::size_t> q;
            q.push(s);
            label[s] = id;
            while (!q.empty()) {
                const std::size_t c = q.front();
                q.pop();
                ++count;
                for (int a = 0; a < dim; ++a)
                    for (int dir : {-1, 1}) {
                        const long nb = gd.neighbor(c, a, dir);
                        if (nb >= 0 && gd.inside[nb] && label[nb] < 0) {
                            label[nb] = id;
                            q.push(static_cast<std::size_t>(nb));
                        }
                    }
            }
            sizes.push_back(count);
        }
        if (sizes.size() > 1) {
            const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
            std::size_t dropped = 0;
            for (std::size_t c = 0; c < total; ++c)
                if (gd.inside[c] && label[c] != keep) {
                    gd.inside[c] = 0;
                    ++dropped;
                }
            gd.dropped_measure = dropped * gd.cell_measure();
            gd.warnings.push_back("dropped " + std::to_string(sizes.size() - 1) +
                                  " disconnected grid component(s) of total measure " +
                                  format_number(gd.dropped_measure));
        }
    }

    for (std::size_t c = 0; c < total; ++c)
        if (gd.inside[c]) gd.inside_cells.push_back(c);
    gd.grid_measure = gd.inside_cells.size() * gd.cell_measure();
    gd.exact_measure = dom->exact_measure();

    gd.resolved_depth = dom->k_max();
    for (const auto& f : dom->feature_scales()) {
        if (f.size < 2.0 * h) {
            gd.resolved_depth = f.k - 1;
            break;
        }
    }
    if (gd.resolved_depth < dom->k_max())
        gd.warnings.push_back("h = " + format_number(h) + " resolves the construction only to depth " +
                              std::to_string(gd.resolved_depth) + " of k_max = " + std::to_string(dom->k_max()));

    gd.dist.assign(total, std::numeric_limits<double>::quiet_NaN());
    if (opts.distance == DistanceMode::Exact) {
        parallel_for(gd.inside_cells.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const std::size_t c = gd.inside_cells[i];
                gd.dist[c] = dom->exact_distance(gd.center(c));
            }
        });
    } else {
        // Distance from each centre to the nearest outside centre, minus half a cell,
        // on a grid padded by one layer of outside cells.
        int m[3] = {1, 1, 1};
        for (int a = 0; a < dim; ++a) m[a] = gd.n[a] + 2;
        std::vector<std::uint8_t> src(static_cast<std::size_t>(m[0]) * m[1] * m[2], 1);
        auto pidx = [&](int i, int j, int k) {
            return (static_cast<std::size_t>(k) * m[1] + j) * m[0] + i;
        };
        for (std::size_t c : gd.inside_cells) {
            int i, j, k;
            gd.unindex(c, i, j, k);
            src[pidx(i + 1, dim > 1 ? j + 1 : 0, dim > 2 ? k + 1 : 0)] = 0;
        }
        const auto sq = squared_edt(src, m, dim);
        const auto isolated = dom->isolated_boundary_points();
        for (std::size_t c : gd.inside_cells) {
            int i, j, k;
            gd.unindex(c, i, j, k);
            double d = std::sqrt(sq[pidx(i + 1, dim > 1 ? j + 1 : 0, dim > 2 ? k + 1 : 0)]) * h - 0.5 * h;
            if (!isolated.empty()) {
                const Point x = gd.center(c);
                for (const auto& pt : isolated) {
                    double s = 0.0;
                    for (int a = 0; a < dim; ++a) s += (x[a] - pt[a]) * (x[a] - pt[a]);
                    d = std::min(d, std::sqrt(s));
                }
            }
            gd.dist[c] = d;
        }
    }
    return gd;
}

void write_grid_csv(std::ostream& out, const GridDomain& gd) {
    static const char* names[3] = {"x", "y", "z"};
    for (int a = 0; a < gd.dim; ++a) out << names[a] << ',';
    out << "inside,distance\n";
    for (std::size_t c = 0; c < gd.cell_count(); ++c) {
        const Point p = gd.center(c);
        for (int a = 0; a < gd.dim; ++a) out << format_number(p[a]) << ',';
        out << int(gd.inside[c]) << ',' << (gd.inside[c] ? format_number(gd.dist[c]) : std::string()) << '\n';
    }
}

}  // namespace sobtrace
