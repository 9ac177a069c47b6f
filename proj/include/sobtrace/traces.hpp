#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sobtrace/domains.hpp"
#include "sobtrace/lorentz.hpp"
#include "sobtrace/rearrangement.hpp"

namespace sobtrace {

// Real function on the inside cells of a grid domain (zero elsewhere).
struct GridFunction {
    std::shared_ptr<const GridDomain> parent;
    std::vector<double> values;
    std::string label;
};

GridFunction make_grid_function(std::shared_ptr<const GridDomain> gd, const std::function<double(const Point&)>& f,
                                std::string label = {});

// Grid function evaluated through the cell's distance value: f(x, d(x)).
GridFunction make_grid_function_with_distance(std::shared_ptr<const GridDomain> gd,
                                              const std::function<double(const Point&, double)>& f,
                                              std::string label = {});

// Named test fields: "one" (u = 1, alias "inv_d"), "d" (u = d), "hardy_ratio"
// (u = 1 - |x|), "bump" (u = phi d with phi = 2.5 (1 - |x-c|^2/rho^2)_+).
GridFunction make_field(std::shared_ptr<const GridDomain> gd, const std::string& field);

// Closed form of mu{|u|/d > xi} for the fields where it is known.
std::optional<ClosedFormDistribution> closed_form_ratio_distribution(const Domain& dom, const std::string& field);

// Central differences where both face neighbours are inside, one-sided where only one is, else 0.
std::vector<GridFunction> partial_derivatives(const GridFunction& u);
GridFunction gradient_magnitude(const GridFunction& u);

struct SobolevNorm {
    double lp = 0.0;       // ||u||_p
    double grad_lp = 0.0;  // || |grad u| ||_p
    double w1p = 0.0;      // (||u||_p^p + sum_i ||d_i u||_p^p)^{1/p}
};
SobolevNorm sobolev_norm(const GridFunction& u, double p);

double lp_norm(const GridFunction& u, double p);

struct TruncationReport {
    GridFunction d_eta;
    double residual = 0.0;  // ||d - d_eta||_p
    double bound = 0.0;     // eta lambda^{1/p}
    bool within_bound = false;
};
// d_eta = (d - eta)_+ on the grid.
TruncationReport distance_truncation(std::shared_ptr<const GridDomain> gd, double eta, double p);

struct ApproxRow {
    int k = 0;
    double res_w1p = 0.0;        // ||u - u_k||_{W^{1,p}}
    double res_lp = 0.0;         // ||u - u_k||_p
    double measure_Ek = 0.0;     // lambda{u > k d}
    double k_mu_pow = 0.0;       // k lambda(E_k)^{1/p}
    double grad_on_Ek = 0.0;     // || chi_{E_k} |grad u| ||_p
    bool measure_resolved = true;
    bool measure_from_closed_form = false;
};

enum class TraceVerdict { CONSISTENT_WITH_ZERO_TRACE, INCONSISTENT, INCONCLUSIVE };
std::string to_string(TraceVerdict v);

struct DiagnosticReport {
    double p = 1.0;
    double weak_norm = 0.0;
    ACReport ac;
    double sobolev_seminorm = 0.0;
    std::vector<ApproxRow> approx_residuals;
    bool trend_vanishes = false;
    bool trend_persists = false;
    TraceVerdict verdict = TraceVerdict::INCONCLUSIVE;
    std::vector<std::string> notes;
};

// u_k = min(u, k d) and E_k = {u > k d} for each k; u must be nonnegative.
DiagnosticReport approximation_scheme(const GridFunction& u, double p, const std::vector<int>& k_list,
                                      const std::optional<ClosedFormDistribution>& ratio_closed_form = std::nullopt,
                                      const ProbeSpec& probes = {});

// Positive and negative parts.
std::pair<GridFunction, GridFunction> split_signed(const GridFunction& u);

std::string to_json(const DiagnosticReport& r);
void write_residuals_csv(std::ostream& out, const DiagnosticReport& r);

struct RatioField {
    SampledFunction ratio;               // |u|/d per inside cell
    double xi_cap = 0.0;                 // sup|u| / (2h): larger ratios come from cells below resolution
    double near_boundary_measure = 0.0;  // cells with d < 2h
};
RatioField ratio_field(const GridFunction& u);

// sup over r in {h, 2h, ..., R} of the average of |f| over closed lattice balls |offset| h <= r;
// cells outside the domain count as zero.
GridFunction maximal_operator(const GridFunction& f, double R);
GridFunction maximal_operator(const GridFunction& f, const std::vector<double>& R_per_cell);

struct HardyResult {
    double worst_constant = 0.0;
    std::size_t cells_evaluated = 0;
};
// max over cells with d < r0 of (|u|/d) / M_{2d}(|grad u| chi_{B(x,d)}).
HardyResult hardy_pointwise_check(const GridFunction& u, double r0 = 0.125);

// ---------------------------------------------------------------------------
// One-dimensional criteria on an interval (a, b).

struct OneDOptions {
    int levels = 30;           // endpoint probes at offsets (b-a) 2^{-j}, j <= levels
    int quad_cells = 1 << 16;  // midpoint quadrature cells
    double zero_tol_rel = 1e-3;
};

struct OneDResult {
    double limit_a = 0.0;
    double limit_b = 0.0;
    double sup_abs = 0.0;
    bool zero_trace = false;
    double lp = 0.0;
    double deriv_lp = 0.0;
    double w1p = 0.0;
    double sup_constant = 0.0;   // (b-a)^{-1/p} max{1, b-a}
    bool sup_bound_holds = false;
    double triangle_constant = 0.0;  // 2^{1-1/p} (b-a)^{-1/p} max{1, b-a}
    bool triangle_bound_holds = false;
};

OneDResult oned_zero_trace(const std::function<double(double)>& u, double a, double b, double p,
                           const OneDOptions& opts = {});

}  // namespace sobtrace
