#include "sobtrace/ball_portion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sobtrace/parallel.hpp"

namespace sobtrace {

namespace {

constexpr std::size_t kChunk = 4096;

double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool near_boundary(const Domain& dom, std::span<const double> x, double tol) {
    if (dom.inside(x)) return dom.exact_distance(x) <= tol;
    const int N = dom.dim();
    if (N > 3) return true;
    int total = 1;
    for (int a = 0; a < N; ++a) total *= 3;
    Point y(N);
    for (int code = 0; code < total; ++code) {
        int c = code;
        bool zero = true;
        for (int a = 0; a < N; ++a) {
            const int o = c % 3 - 1;
            c /= 3;
            zero = zero && o == 0;
            y[a] = x[a] + o * tol;
        }
        if (!zero && dom.inside(y)) return true;
    }
    return false;
}

}  // namespace

std::string to_string(BallPortionVerdict v) {
    return v == BallPortionVerdict::VIOLATED_SEQUENCE_FOUND ? "VIOLATED_SEQUENCE_FOUND" : "PLAUSIBLY_SATISFIED";
}

RatioEstimate ball_portion_ratio(const Domain& dom, std::span<const double> x, double r, std::size_t mc_samples,
                                 std::uint64_t seed, std::uint64_t probe_id, double boundary_tol) {
    if (mc_samples < 100) throw std::invalid_argument("ball_portion_ratio needs at least 100 samples");
    if (!(r > 0.0)) throw std::invalid_argument("ball_portion_ratio: radius must be positive");
    if (static_cast<int>(x.size()) != dom.dim()) throw std::invalid_argument("ball_portion_ratio: wrong dimension");
    if (!near_boundary(dom, x, boundary_tol))
        throw std::invalid_argument("ball_portion_ratio: point is not on the boundary");
    const int N = dom.dim();
    const std::uint64_t stream = mix_seed(seed, probe_id);
    const std::size_t chunks = (mc_samples + kChunk - 1) / kChunk;
    std::vector<std::size_t> outside(chunks, 0);
    parallel_for(chunks, [&](std::size_t b, std::size_t e) {
        Point v(N), y(N);
        for (std::size_t ch = b; ch < e; ++ch) {
            std::mt19937_64 rng(mix_seed(stream, ch));
            const std::size_t n = std::min(kChunk, mc_samples - ch * kChunk);
            std::size_t count = 0;
            for (std::size_t s = 0; s < n; ++s) {
                double r2;
                do {
                    r2 = 0.0;
                    for (int a = 0; a < N; ++a) {
                        v[a] = 2.0 * unit_real(rng) - 1.0;
                        r2 += v[a] * v[a];
                    }
                } while (r2 >= 1.0);
                for (int a = 0; a < N; ++a) y[a] = x[a] + r * v[a];
                if (!dom.inside(y)) ++count;
            }
            outside[ch] = count;
        }
    });
    std::size_t total = 0;
    for (auto c : outside) total += c;
    RatioEstimate est;
    est.samples = mc_samples;
    est.ratio = static_cast<double>(total) / mc_samples;
    est.std_error = std::sqrt(est.ratio * (1.0 - est.ratio) / mc_samples);
    return est;
}

BallPortionReport ball_portion_scan(const Domain& dom, const std::vector<Point>& boundary_samples,
                                    const std::vector<double>& radii, double b_threshold, std::size_t mc_samples,
                                    std::uint64_t seed) {
    if (boundary_samples.empty() || radii.empty())
        throw std::invalid_argument("ball_portion_scan needs boundary samples and radii");
    std::vector<double> rs = radii;
    std::sort(rs.begin(), rs.end(), std::greater<>());
    BallPortionReport rep;
    std::vector<BallPortionProbe> minima;
    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
        BallPortionProbe best;
        best.ratio = 2.0;
        for (std::size_t pi = 0; pi < boundary_samples.size(); ++pi) {
            const auto est = ball_portion_ratio(dom, boundary_samples[pi], rs[ri], mc_samples, seed,
                                                ri * boundary_samples.size() + pi);
            BallPortionProbe pr{boundary_samples[pi], rs[ri], est.ratio, est.std_error};
            rep.probes.push_back(pr);
            if (pr.ratio < best.ratio) best = pr;
        }
        minima.push_back(best);
        rep.infimum_estimate = std::min(rep.infimum_estimate, best.ratio);
    }
    // Longest run of strictly decreasing minima that ends below the threshold.
    std::size_t best_len = 0, best_end = 0;
    std::size_t run = 1;
    for (std::size_t i = 0; i < minima.size(); ++i) {
        if (i > 0) run = minima[i].ratio < minima[i - 1].ratio ? run + 1 : 1;
        if (run >= 3 && minima[i].ratio < b_threshold && run >= best_len) {
            best_len = run;
            best_end = i;
        }
    }
    if (best_len >= 3) {
        rep.verdict = BallPortionVerdict::VIOLATED_SEQUENCE_FOUND;
        rep.witnesses.assign(minima.begin() + static_cast<long>(best_end + 1 - best_len),
                             minima.begin() + static_cast<long>(best_end + 1));
    }
    return rep;
}

}  // namespace sobtrace
