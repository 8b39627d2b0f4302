#include "bclab/map.hpp"

#include <algorithm>
#include <cmath>

namespace bclab {

namespace {

inline double left_branch(double alpha, double x) {
    return x * (1.0 + std::pow(2.0 * x, alpha));
}

inline double left_branch_deriv(double alpha, double x) {
    return 1.0 + (1.0 + alpha) * std::pow(2.0 * x, alpha);
}

} // namespace

double invert_left(const MapParams& params, double y) {
    check_state(y);
    const double alpha = params.alpha;

    // The branch is strictly increasing from 0 to 1 on (0,1/2], so the root
    // is always bracketed by [0, 1/2].
    double lo = 0.0;
    double hi = 0.5;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (left_branch(alpha, mid) < y)
            lo = mid;
        else
            hi = mid;
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 5; ++it) {
        const double fx = left_branch(alpha, x) - y;
        if (fx < 0.0)
            lo = std::max(lo, x);
        else
            hi = std::min(hi, x);
        const double nx = x - fx / left_branch_deriv(alpha, x);
        if (nx < lo || nx > hi) {
            // Newton left the bracket: finish with pure bisection.
            while (hi - lo > 2e-16) {
                const double mid = 0.5 * (lo + hi);
                if (left_branch(alpha, mid) < y)
                    lo = mid;
                else
                    hi = mid;
            }
            x = 0.5 * (lo + hi);
            break;
        }
        if (std::abs(nx - x) <= 1e-14) {
            x = nx;
            break;
        }
        x = nx;
    }
    return std::min(x, 0.5);
}

PreimagePair preimage_interval(const MapParams& params, const Interval& b) {
    if (!b.valid())
        throw std::invalid_argument("preimage_interval: invalid interval");
    PreimagePair out;
    const double llo = b.lo > 0.0 ? invert_left(params, b.lo) : 0.0;
    const double lhi = invert_left(params, b.hi);
    out.left = Interval{llo, lhi};
    out.right = Interval{0.5 * (b.lo + 1.0), 0.5 * (b.hi + 1.0)};
    return out;
}

PartitionTable partition_points(const MapParams& params, int k) {
    if (k < 0)
        throw std::invalid_argument("partition_points: k must be >= 0");
    PartitionTable table;
    table.points.reserve(static_cast<std::size_t>(k) + 1);
    table.points.push_back(0.5);
    for (int j = 0; j < k; ++j)
        table.points.push_back(invert_left(params, table.points.back()));
    return table;
}

std::vector<std::uint8_t> iterate_hits(const MapParams& params, double x0,
                                       const IntervalSchedule& schedule, std::int64_t n) {
    if (n < 1)
        throw std::invalid_argument("iterate_hits: n must be >= 1");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for_each_iterate(params, x0, n, [&](std::int64_t k, double x) {
        bits[static_cast<std::size_t>(k - 1)] = schedule.at(k).contains(x) ? 1 : 0;
    });
    return bits;
}

} // namespace bclab
