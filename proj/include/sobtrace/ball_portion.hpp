#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sobtrace/domains.hpp"

namespace sobtrace {

struct RatioEstimate {
    double ratio = 0.0;      // fraction of B(x,r) outside the domain
    double std_error = 0.0;  // sqrt(ratio (1 - ratio) / samples)
    std::size_t samples = 0;
};

// Monte Carlo estimate of |B(x,r) \ Omega| / |B(x,r)|. The stream is fixed by
// (seed, probe_id) and split into fixed chunks, so the result does not depend on
// the thread count.
RatioEstimate ball_portion_ratio(const Domain& dom, std::span<const double> x, double r, std::size_t mc_samples,
                                 std::uint64_t seed, std::uint64_t probe_id = 0, double boundary_tol = 1e-6);

struct BallPortionProbe {
    Point x;
    double r = 0.0;
    double ratio = 0.0;
    double std_error = 0.0;
};

enum class BallPortionVerdict { PLAUSIBLY_SATISFIED, VIOLATED_SEQUENCE_FOUND };
std::string to_string(BallPortionVerdict v);

struct BallPortionReport {
    std::vector<BallPortionProbe> probes;
    std::vector<BallPortionProbe> witnesses;  // the decreasing run, when found
    double infimum_estimate = 1.0;
    BallPortionVerdict verdict = BallPortionVerdict::PLAUSIBLY_SATISFIED;
};

// Evaluates the ratio on boundary_samples x radii. A violation is at least three
// consecutive shrinking radii whose minimum ratios decrease strictly, ending below
// b_threshold.
BallPortionReport ball_portion_scan(const Domain& dom, const std::vector<Point>& boundary_samples,
                                    const std::vector<double>& radii, double b_threshold,
                                    std::size_t mc_samples = 20000, std::uint64_t seed = 0);

}  // namespace sobtrace
