#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sobtrace/rearrangement.hpp"

namespace sobtrace {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LorentzIndex {
    double p = 1.0;
    double q = kInf;  // kInf selects the weak (sup) form

    bool weak() const { return q == kInf; }
    void validate() const;
    std::string str() const;
};

double lorentz_quasinorm_rearranged(const StepRearrangement& r, const LorentzIndex& idx);
double lorentz_quasinorm_rearranged(const SampledFunction& f, const LorentzIndex& idx);

// Same quantity evaluated through mu_f: p^{1/q} || xi^{1-1/q} mu_f(xi)^{1/p} ||_{L^q(0,inf)}.
double lorentz_quasinorm_distribution(const SampledFunction& f, const LorentzIndex& idx);

// Weak-norm estimate for a sampled function whose large values are only trusted
// up to xi_cap. Takes the max of xi mu(xi)^{1/p} over dyadic xi <= xi_cap and of a
// least-squares extrapolation (linear in 1/xi) of the last three probes.
double weak_norm_estimate(const SampledFunction& f, double p, double xi_cap);

// A distribution function known in closed form.
struct ClosedFormDistribution {
    std::function<double(double)> mu;     // mu(xi) = measure{|f| > xi}
    double total_measure = 0.0;
    std::vector<double> jumps;           // points where mu jumps; left limits enter the weak norm
    std::string label;
};

// sup_xi xi mu(xi)^{1/p}, probed on dyadic points, a fine log grid, and left limits at jumps.
double closed_form_weak_norm(const ClosedFormDistribution& d, double p, double decades = 18.0);

// f*(t) = inf{xi : mu(xi) <= t} by bisection.
double closed_form_rearrangement(const ClosedFormDistribution& d, double t);

enum class ACVerdict { AC_CONSISTENT, AC_VIOLATED_AT_ZERO, AC_VIOLATED_AT_INFINITY, INCONCLUSIVE };
std::string to_string(ACVerdict v);

struct ProbeSpec {
    double decades = 6.0;          // dyadic probes 2^{+-j}, j = 1..ceil(decades log2 10)
    double threshold_rel = 1e-3;   // relative to the weak quasinorm
};

struct TrendSample {
    std::string criterion;  // "xi" for xi mu(xi)^{1/p}, "t" for t^{1/p} f*(t), or a tail coordinate
    std::string end;        // "zero" or "infinity" (of the abscissa)
    double abscissa;
    double value;
};

enum class TailState { CONSISTENT, VIOLATED, INCONCLUSIVE };

struct ACReport {
    double p = 1.0;
    double weak_norm = 0.0;
    double threshold = 0.0;
    double limit_at_zero_estimate = 0.0;      // xi mu(xi)^{1/p} as xi -> 0+
    double limit_at_infinity_estimate = 0.0;  // xi mu(xi)^{1/p} as xi -> inf
    double t_limit_at_zero_estimate = 0.0;    // t^{1/p} f*(t) as t -> 0+
    TailState zero_state = TailState::INCONCLUSIVE;
    TailState infinity_state = TailState::INCONCLUSIVE;
    std::vector<TrendSample> trend_samples;
    ACVerdict verdict = ACVerdict::INCONCLUSIVE;
};

// Sampled input. The xi -> inf end is probed only up to xi_cap (defaults to the
// largest sample value) and can at most be INCONCLUSIVE there.
ACReport ac_diagnostic(const SampledFunction& f, double p, const ProbeSpec& probes = {},
                       double xi_cap = kInf);

ACReport ac_diagnostic(const ClosedFormDistribution& d, double p, const ProbeSpec& probes = {});

// t^{1/p} f*(t) as t -> 0+ known analytically through a coordinate y, with t -> 0
// as y -> inf. Probes y_j = y0 2^j. The t -> inf end uses the finite total measure.
struct AnalyticTail {
    std::function<double(double)> scaled_value;  // y -> t^{1/p} f*(t(y))
    double y0 = 1.0;
    std::string coordinate;
};
ACReport ac_diagnostic(const AnalyticTail& tail, const SampledFunction& body, double p,
                       const ProbeSpec& probes = {});

std::string to_json(const ACReport& r);

// Stated norm of L^{p,q} -> L^{p,r}: (p/q)^{1/q - 1/r}, with 1/inf = 0.
double embedding_constant(double p, double q, double r);
// Value attained by indicator functions: (q/p)^{1/q - 1/r}.
double sharp_embedding_constant(double p, double q, double r);

// Conjugate exponent; p = 1 gives inf and p = inf gives 1.
double conjugate_exponent(double p);

// (||fg||_1, ||f||_p ||g||_{p'}) for f, g on the same partition.
std::pair<double, double> holder_check(const SampledFunction& f, const SampledFunction& g, double p);

// Geometric-cell sampling of h(t) = t^{-1/p} / log log(1/t) on (0, K),
// K = min(total_measure, exp(-e^p)), zero on [K, total_measure).
SampledFunction sierpinski_counterexample(double p, double total_measure, int n_cells);
double sierpinski_cutoff(double p, double total_measure);
double sierpinski_value(double p, double t);
AnalyticTail sierpinski_tail(double p);

// Partial integral of (t^{1/p} h(t))^q dt/t over (eps, K) expressed through
// L = log(1/eps): int_{y(K)}^{log L} e^y y^{-q} dy.
double sierpinski_partial_integral(double p, double q, double total_measure, double log_inv_eps);

// Convergent comparison profile f*(t) = t^{-1/p} / log^2(1/t); same partial
// integral convention.
double log_square_partial_integral(double p, double q, double total_measure, double log_inv_eps);

struct CauchyTest {
    std::vector<double> log_inv_eps;
    std::vector<double> partial;
    std::vector<double> increments;
    bool diverges = false;
};
// Divergent when successive increments across the decades are positive and non-decreasing.
CauchyTest cauchy_divergence_test(const std::function<double(double)>& partial_integral,
                                  const std::vector<double>& log_inv_eps);

}  // namespace sobtrace
