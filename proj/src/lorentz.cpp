#include "sobtrace/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sobtrace {

namespace {

int probe_count(const ProbeSpec& probes) {
    if (!(probes.decades > 0.0)) throw std::invalid_argument("probe range is empty");
    const int j = static_cast<int>(std::ceil(probes.decades * std::log2(10.0)));
    if (j < 3) throw std::invalid_argument("probe range must allow at least three probes");
    return j;
}

// Classifies the last three values of a probe sequence.
TailState classify(const std::vector<double>& vals, double threshold, bool may_certify) {
    if (vals.size() < 3) return TailState::INCONCLUSIVE;
    const double a = vals[vals.size() - 3], b = vals[vals.size() - 2], c = vals.back();
    if (a >= b && b >= c && c < threshold) return may_certify ? TailState::CONSISTENT : TailState::INCONCLUSIVE;
    const double lo = std::min({a, b, c}), hi = std::max({a, b, c});
    if (lo > threshold && hi - lo <= 0.1 * hi) return TailState::VIOLATED;
    return TailState::INCONCLUSIVE;
}

ACVerdict combine(TailState zero, TailState inf) {
    if (inf == TailState::VIOLATED) return ACVerdict::AC_VIOLATED_AT_INFINITY;
    if (zero == TailState::VIOLATED) return ACVerdict::AC_VIOLATED_AT_ZERO;
    if (zero == TailState::CONSISTENT && inf == TailState::CONSISTENT) return ACVerdict::AC_CONSISTENT;
    return ACVerdict::INCONCLUSIVE;
}

std::string state_name(TailState s) {
    switch (s) {
        case TailState::CONSISTENT: return "CONSISTENT";
        case TailState::VIOLATED: return "VIOLATED";
        default: return "INCONCLUSIVE";
    }
}

double pow_inv(double x, double p) { return p == 1.0 ? x : std::pow(x, 1.0 / p); }

// Intercept of a least-squares line through (1/xi, g).
double extrapolate_inverse(const std::vector<double>& xi, const std::vector<double>& g) {
    const std::size_t n = xi.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 1.0 / xi[i];
        sx += x;
        sy += g[i];
        sxx += x * x;
        sxy += x * g[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return g.back();
    const double slope = (n * sxy - sx * sy) / den;
    return (sy - slope * sx) / n;
}

}  // namespace

void LorentzIndex::validate() const {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("Lorentz index p must lie in [1, inf)");
    if (!(q >= 1.0)) throw std::invalid_argument("Lorentz index q must be >= 1 or inf");
}

std::string LorentzIndex::str() const {
    return "(" + format_number(p) + ", " + (weak() ? std::string("inf") : format_number(q)) + ")";
}

double lorentz_quasinorm_rearranged(const StepRearrangement& r, const LorentzIndex& idx) {
    idx.validate();
    const auto& b = r.breakpoints();
    const auto& lv = r.levels();
    if (idx.weak()) {
        double best = 0.0;
        for (std::size_t i = 0; i < lv.size(); ++i) best = std::max(best, lv[i] * pow_inv(b[i + 1], idx.p));
        return best;
    }
    const double e = idx.q / idx.p;
    double sum = 0.0;
    for (std::size_t i = 0; i < lv.size(); ++i) {
        if (lv[i] == 0.0) continue;
        sum += std::pow(lv[i], idx.q) * (std::pow(b[i + 1], e) - std::pow(b[i], e)) / e;
    }
    return std::pow(sum, 1.0 / idx.q);
}

double lorentz_quasinorm_rearranged(const SampledFunction& f, const LorentzIndex& idx) {
    return lorentz_quasinorm_rearranged(rearrange(f), idx);
}

double lorentz_quasinorm_distribution(const SampledFunction& f, const LorentzIndex& idx) {
    idx.validate();
    // Distinct values in ascending order; mu is constant on [v_{j-1}, v_j).
    std::vector<Sample> s = f.samples();
    std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.value < b.value; });
    std::vector<double> values, above;  // above[j] = mu{|f| >= values[j]}
    {
        double tail = f.total_measure();
        double removed = 0.0;
        for (std::size_t i = 0; i < s.size();) {
            const double v = s[i].value;
            double m = 0.0;
            while (i < s.size() && s[i].value == v) m += s[i++].measure;
            values.push_back(v);
            above.push_back(tail - removed);
            removed += m;
        }
    }
    double prev = 0.0;
    if (idx.weak()) {
        double best = 0.0;
        for (std::size_t j = 0; j < values.size(); ++j) {
            // sup over xi in [prev, v_j) of xi mu(xi)^{1/p} approached at v_j
            best = std::max(best, values[j] * pow_inv(above[j], idx.p));
            prev = values[j];
        }
        return best;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double v = values[j];
        if (v > prev) sum += std::pow(above[j], idx.q / idx.p) * (std::pow(v, idx.q) - std::pow(prev, idx.q)) / idx.q;
        prev = v;
    }
    return std::pow(idx.p * sum, 1.0 / idx.q);
}

double weak_norm_estimate(const SampledFunction& f, double p, double xi_cap) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    const double cap = std::min(xi_cap, f.sup());
    const auto r = rearrange(f);
    const auto& lv = r.levels();
    const auto& b = r.breakpoints();
    double best = 0.0;
    // The lowest level is attained on a whole step; its left limit is unbiased.
    if (lv.back() <= cap) best = lv.back() * pow_inv(b.back(), p);
    // Harmonic midpoints between consecutive levels.
    for (std::size_t i = 0; i + 1 < lv.size(); ++i) {
        if (lv[i] > cap || lv[i + 1] == 0.0) continue;
        const double mid = 2.0 / (1.0 / lv[i] + 1.0 / lv[i + 1]);
        best = std::max(best, mid * pow_inv(b[i + 1], p));
    }
    std::vector<double> xs, gs;
    for (int j = -1074; j <= 1023; ++j) {
        const double xi = std::ldexp(1.0, j);
        if (xi > cap) break;
        const double m = distribution(r, xi);
        if (m <= 0.0) continue;
        const double g = xi * pow_inv(m, p);
        best = std::max(best, g);
        xs.push_back(xi);
        gs.push_back(g);
    }
    if (xs.size() >= 3) {
        std::vector<double> tx(xs.end() - 3, xs.end()), tg(gs.end() - 3, gs.end());
        best = std::max(best, extrapolate_inverse(tx, tg));
    }
    return best;
}

double closed_form_weak_norm(const ClosedFormDistribution& d, double p, double decades) {
    double best = 0.0;
    const double span = decades * std::log2(10.0);
    const int per_octave = 64;
    const int n = static_cast<int>(2 * span * per_octave);
    for (int i = 0; i <= n; ++i) {
        const double xi = std::exp2(-span + static_cast<double>(i) / per_octave);
        best = std::max(best, xi * pow_inv(d.mu(xi), p));
    }
    for (double jump : d.jumps) {
        const double left = std::nextafter(jump, 0.0);
        best = std::max(best, left * pow_inv(d.mu(left), p));
    }
    return best;
}

double closed_form_rearrangement(const ClosedFormDistribution& d, double t) {
    if (!(t >= 0.0) || !(t < d.total_measure)) throw std::invalid_argument("t outside [0, total measure)");
    if (d.mu(0.0) <= t) return 0.0;
    double hi = 1.0;
    while (d.mu(hi) > t) {
        hi *= 2.0;
        if (hi > 1e300) return kInf;
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (d.mu(mid) <= t) hi = mid; else lo = mid;
    }
    return hi;
}

std::string to_string(ACVerdict v) {
    switch (v) {
        case ACVerdict::AC_CONSISTENT: return "AC_CONSISTENT";
        case ACVerdict::AC_VIOLATED_AT_ZERO: return "AC_VIOLATED_AT_ZERO";
        case ACVerdict::AC_VIOLATED_AT_INFINITY: return "AC_VIOLATED_AT_INFINITY";
        default: return "INCONCLUSIVE";
    }
}

ACReport ac_diagnostic(const SampledFunction& f, double p, const ProbeSpec& probes, double xi_cap) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    const int J = probe_count(probes);
    const bool capped = xi_cap < f.sup();
    const double cap = std::min(xi_cap, f.sup());
    ACReport rep;
    rep.p = p;
    rep.weak_norm = capped ? weak_norm_estimate(f, p, cap) : lorentz_quasinorm_rearranged(f, {p, kInf});
    rep.threshold = probes.threshold_rel * rep.weak_norm;
    const auto r = rearrange(f);

    std::vector<double> zero_vals;
    for (int j = 1; j <= J; ++j) {
        const double xi = std::ldexp(1.0, -j);
        const double g = xi * pow_inv(distribution(r, xi), p);
        zero_vals.push_back(g);
        rep.trend_samples.push_back({"xi", "zero", xi, g});
    }
    std::vector<double> inf_vals;
    for (int j = 1; j <= J; ++j) {
        const double xi = std::ldexp(1.0, j);
        if (xi > cap) break;
        const double g = xi * pow_inv(distribution(r, xi), p);
        inf_vals.push_back(g);
        rep.trend_samples.push_back({"xi", "infinity", xi, g});
    }
    // t-criterion: t -> 0 down to the first step, below which f* is constant.
    const double first_step = r.breakpoints()[1];
    for (int j = 1; j <= J; ++j) {
        const double t = r.total_measure() * std::ldexp(1.0, -j);
        if (t < first_step) break;
        const double g = pow_inv(t, p) * evaluate_rearrangement(r, t);
        rep.trend_samples.push_back({"t", "zero", t, g});
        rep.t_limit_at_zero_estimate = g;
    }
    rep.limit_at_zero_estimate = zero_vals.back();
    rep.limit_at_infinity_estimate = inf_vals.empty() ? 0.0 : inf_vals.back();
    rep.zero_state = classify(zero_vals, rep.threshold, true);
    // Beyond the largest sample the distribution vanishes identically; only an
    // uncapped function can certify the infinity end.
    rep.infinity_state = classify(inf_vals, rep.threshold, !capped);
    if (!capped && inf_vals.size() < 3) rep.infinity_state = TailState::CONSISTENT;
    rep.verdict = combine(rep.zero_state, rep.infinity_state);
    return rep;
}

ACReport ac_diagnostic(const ClosedFormDistribution& d, double p, const ProbeSpec& probes) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    const int J = probe_count(probes);
    ACReport rep;
    rep.p = p;
    rep.weak_norm = closed_form_weak_norm(d, p);
    rep.threshold = probes.threshold_rel * rep.weak_norm;
    std::vector<double> zero_vals, inf_vals;
    for (int j = 1; j <= J; ++j) {
        const double xi = std::ldexp(1.0, -j);
        const double g = xi * pow_inv(d.mu(xi), p);
        zero_vals.push_back(g);
        rep.trend_samples.push_back({"xi", "zero", xi, g});
    }
    for (int j = 1; j <= J; ++j) {
        const double xi = std::ldexp(1.0, j);
        const double g = xi * pow_inv(d.mu(xi), p);
        inf_vals.push_back(g);
        rep.trend_samples.push_back({"xi", "infinity", xi, g});
    }
    for (int j = 1; j <= J; ++j) {
        const double t = d.total_measure * std::ldexp(1.0, -j);
        const double g = pow_inv(t, p) * closed_form_rearrangement(d, t);
        rep.trend_samples.push_back({"t", "zero", t, g});
        rep.t_limit_at_zero_estimate = g;
    }
    rep.limit_at_zero_estimate = zero_vals.back();
    rep.limit_at_infinity_estimate = inf_vals.back();
    rep.zero_state = classify(zero_vals, rep.threshold, true);
    rep.infinity_state = classify(inf_vals, rep.threshold, true);
    rep.verdict = combine(rep.zero_state, rep.infinity_state);
    return rep;
}

ACReport ac_diagnostic(const AnalyticTail& tail, const SampledFunction& body, double p, const ProbeSpec& probes) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    const int J = probe_count(probes);
    ACReport rep;
    rep.p = p;
    const auto r = rearrange(body);
    rep.weak_norm = lorentz_quasinorm_rearranged(r, {p, kInf});
    for (int j = 0; j <= J; ++j) rep.weak_norm = std::max(rep.weak_norm, tail.scaled_value(tail.y0 * std::ldexp(1.0, j)));
    rep.threshold = probes.threshold_rel * rep.weak_norm;

    std::vector<double> zero_vals, t_vals;
    for (int j = 1; j <= J; ++j) {
        const double xi = std::ldexp(1.0, -j);
        const double g = xi * pow_inv(distribution(r, xi), p);
        zero_vals.push_back(g);
        rep.trend_samples.push_back({"xi", "zero", xi, g});
    }
    for (int j = 1; j <= J; ++j) {
        const double y = tail.y0 * std::ldexp(1.0, j);
        const double g = tail.scaled_value(y);
        t_vals.push_back(g);
        rep.trend_samples.push_back({tail.coordinate, "infinity", y, g});
    }
    rep.limit_at_zero_estimate = zero_vals.back();
    rep.t_limit_at_zero_estimate = t_vals.back();
    // t -> 0 corresponds to xi -> inf
    rep.limit_at_infinity_estimate = t_vals.back();
    rep.zero_state = classify(zero_vals, rep.threshold, true);
    rep.infinity_state = classify(t_vals, rep.threshold, true);
    rep.verdict = combine(rep.zero_state, rep.infinity_state);
    return rep;
}

std::string to_json(const ACReport& r) {
    nlohmann::ordered_json j;
    j["p"] = r.p;
    j["weak_norm"] = r.weak_norm;
    j["threshold"] = r.threshold;
    j["limit_at_zero_estimate"] = r.limit_at_zero_estimate;
    j["limit_at_infinity_estimate"] = r.limit_at_infinity_estimate;
    j["t_limit_at_zero_estimate"] = r.t_limit_at_zero_estimate;
    j["zero_end"] = state_name(r.zero_state);
    j["infinity_end"] = state_name(r.infinity_state);
    auto samples = nlohmann::ordered_json::array();
    for (const auto& s : r.trend_samples)
        samples.push_back({{"criterion", s.criterion}, {"end", s.end}, {"abscissa", s.abscissa}, {"value", s.value}});
    j["trend_samples"] = samples;
    j["verdict"] = to_string(r.verdict);
    return j.dump(2);
}

double embedding_constant(double p, double q, double r) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must lie in [1, inf)");
    if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("q must lie in [1, inf)");
    if (!(r >= q)) throw std::invalid_argument("embedding needs q <= r");
    const double inv_r = r == kInf ? 0.0 : 1.0 / r;
    return std::pow(p / q, 1.0 / q - inv_r);
}

double sharp_embedding_constant(double p, double q, double r) {
    const double stated = embedding_constant(p, q, r);
    return stated == 0.0 ? 0.0 : 1.0 / stated;
}

double conjugate_exponent(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("exponent must be >= 1");
    if (p == 1.0) return kInf;
    if (p == kInf) return 1.0;
    return p / (p - 1.0);
}

std::pair<double, double> holder_check(const SampledFunction& f, const SampledFunction& g, double p) {
    if (f.size() != g.size()) throw std::invalid_argument("holder_check: partitions differ in size");
    const double pc = conjugate_exponent(p);
    double lhs = 0.0, fp = 0.0, gp = 0.0, fsup = 0.0, gsup = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& a = f.samples()[i];
        const auto& b = g.samples()[i];
        if (std::abs(a.measure - b.measure) > 1e-12 * std::max(a.measure, b.measure))
            throw std::invalid_argument("holder_check: partitions differ");
        lhs += a.value * b.value * a.measure;
        if (p != kInf) fp += std::pow(a.value, p) * a.measure;
        if (pc != kInf) gp += std::pow(b.value, pc) * a.measure;
        fsup = std::max(fsup, a.value);
        gsup = std::max(gsup, b.value);
    }
    const double fn = p == kInf ? fsup : std::pow(fp, 1.0 / p);
    const double gn = pc == kInf ? gsup : std::pow(gp, 1.0 / pc);
    return {lhs, fn * gn};
}

double sierpinski_cutoff(double p, double total_measure) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (!(total_measure > 0.0)) throw std::invalid_argument("total measure must be positive");
    return std::min(total_measure, std::exp(-std::exp(p)));
}

double sierpinski_value(double p, double t) {
    return std::pow(t, -1.0 / p) / std::log(std::log(1.0 / t));
}

AnalyticTail sierpinski_tail(double /*p*/) {
    // With y = log log(1/t): t^{1/p} h(t) = 1/y.
    AnalyticTail tail;
    tail.scaled_value = [](double y) { return 1.0 / y; };
    tail.y0 = 1.0;
    tail.coordinate = "loglog(1/t)";
    return tail;
}

SampledFunction sierpinski_counterexample(double p, double total_measure, int n_cells) {
    if (n_cells < 10) throw std::invalid_argument("sierpinski_counterexample needs n_cells >= 10");
    const double K = sierpinski_cutoff(p, total_measure);
    // Geometric cells t_i = K r^i reaching 280 decades below K.
    const double decades = 280.0;
    const double ratio = std::pow(10.0, -decades / n_cells);
    std::vector<Sample> s;
    s.reserve(static_cast<std::size_t>(n_cells) + 2);
    double right = K;
    for (int i = 1; i <= n_cells; ++i) {
        const double left = K * std::pow(ratio, i);
        s.push_back({sierpinski_value(p, right), right - left});
        right = left;
    }
    s.push_back({sierpinski_value(p, right), right});
    if (total_measure > K) s.push_back({0.0, total_measure - K});
    return SampledFunction(std::move(s), "sierpinski");
}

namespace {

// Composite Gauss-Legendre (5 nodes) of g over [a, b].
double gauss_integrate(const std::function<double(double)>& g, double a, double b, int panels) {
    static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
    static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                0.2369268850561891};
    if (!(b > a)) return 0.0;
    const double hw = (b - a) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double c = a + (k + 0.5) * hw;
        for (int i = 0; i < 5; ++i) sum += w[i] * g(c + 0.5 * hw * x[i]);
    }
    return sum * 0.5 * hw;
}

}  // namespace

double sierpinski_partial_integral(double p, double q, double total_measure, double log_inv_eps) {
    const double K = sierpinski_cutoff(p, total_measure);
    const double y_lo = std::log(std::log(1.0 / K));
    const double y_hi = std::log(log_inv_eps);
    if (!(y_hi > y_lo)) return 0.0;
    return gauss_integrate([q](double y) { return std::exp(y) * std::pow(y, -q); }, y_lo, y_hi, 4000);
}

double log_square_partial_integral(double p, double q, double total_measure, double log_inv_eps) {
    // (t^{1/p} f*)^q dt/t = s^{-2q} ds with s = log(1/t); s from log(1/K) to L.
    const double K = sierpinski_cutoff(p, total_measure);
    const double s_lo = std::log(1.0 / K);
    if (!(log_inv_eps > s_lo)) return 0.0;
    const double e = 1.0 - 2.0 * q;
    return (std::pow(log_inv_eps, e) - std::pow(s_lo, e)) / e;
}

CauchyTest cauchy_divergence_test(const std::function<double(double)>& partial_integral,
                                  const std::vector<double>& log_inv_eps) {
    if (log_inv_eps.size() < 3) throw std::invalid_argument("Cauchy test needs at least three cut-offs");
    CauchyTest out;
    out.log_inv_eps = log_inv_eps;
    for (double L : log_inv_eps) out.partial.push_back(partial_integral(L));
    for (std::size_t i = 1; i < out.partial.size(); ++i) out.increments.push_back(out.partial[i] - out.partial[i - 1]);
    out.diverges = true;
    for (std::size_t i = 0; i < out.increments.size(); ++i) {
        if (!(out.increments[i] > 0.0)) out.diverges = false;
        if (i > 0 && out.increments[i] < out.increments[i - 1]) out.diverges = false;
    }
    return out;
}

}  // namespace sobtrace
