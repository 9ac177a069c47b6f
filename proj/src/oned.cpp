#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sobtrace/traces.hpp"

namespace sobtrace {

namespace {

// Least-squares line through (x_i, y_i); returns the value at x = 0.
double intercept(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return sy / n;
    const double slope = (n * sxy - sx * sy) / den;
    return (sy - slope * sx) / n;
}

}  // namespace

OneDResult oned_zero_trace(const std::function<double(double)>& u, double a, double b, double p,
                           const OneDOptions& opts) {
    if (!(a < b)) throw std::invalid_argument("oned_zero_trace: need a < b");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (opts.levels < 3 || opts.quad_cells < 2) throw std::invalid_argument("oned_zero_trace: bad options");
    const double len = b - a;
    OneDResult r;

    std::vector<double> off, ya, yb;
    for (int j = opts.levels - 2; j <= opts.levels; ++j) {
        const double t = len * std::ldexp(1.0, -j);
        off.push_back(t);
        ya.push_back(u(a + t));
        yb.push_back(u(b - t));
    }
    r.limit_a = intercept(off, ya);
    r.limit_b = intercept(off, yb);

    const int n = opts.quad_cells;
    const double dx = len / n;
    std::vector<double> vals(n);
    double sp = 0.0;
    for (int i = 0; i < n; ++i) {
        vals[i] = u(a + (i + 0.5) * dx);
        if (!std::isfinite(vals[i])) throw std::invalid_argument("oned_zero_trace: u is not finite");
        r.sup_abs = std::max(r.sup_abs, std::abs(vals[i]));
        sp += std::pow(std::abs(vals[i]), p);
    }
    for (double v : ya) r.sup_abs = std::max(r.sup_abs, std::abs(v));
    for (double v : yb) r.sup_abs = std::max(r.sup_abs, std::abs(v));
    double dp = 0.0;
    for (int i = 0; i + 1 < n; ++i) dp += std::pow(std::abs(vals[i + 1] - vals[i]) / dx, p);
    const double up = sp * dx, dpp = dp * len / (n - 1);
    r.lp = std::pow(up, 1.0 / p);
    r.deriv_lp = std::pow(dpp, 1.0 / p);
    r.w1p = std::pow(up + dpp, 1.0 / p);

    const double tol = opts.zero_tol_rel * r.sup_abs;
    r.zero_trace = std::abs(r.limit_a) <= tol && std::abs(r.limit_b) <= tol;

    r.sup_constant = std::pow(len, -1.0 / p) * std::max(1.0, len);
    r.sup_bound_holds = r.sup_abs <= r.sup_constant * r.w1p * (1.0 + 1e-9);
    r.triangle_constant = std::pow(2.0, 1.0 - 1.0 / p) * r.sup_constant;
    r.triangle_bound_holds = r.sup_abs <= r.triangle_constant * r.w1p * (1.0 + 1e-9);
    return r;
}

}  // namespace sobtrace
