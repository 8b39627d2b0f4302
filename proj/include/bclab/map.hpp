#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bclab/interval.hpp"
#include "bclab/schedule.hpp"

namespace bclab {

// Interval map on (0,1] with a neutral fixed point at 0:
//   T(x) = x * (1 + (2x)^alpha)  on (0,1/2]
//   T(x) = 2x - 1                on (1/2,1]
// The left branch is written with (2x)^alpha so that T(1/2) == 1 exactly.
struct MapParams {
    double alpha = 0.5;
    double beta = 2.0; // 1/alpha
    static constexpr double branch_cut = 0.5;

    explicit MapParams(double a) : alpha(a), beta(1.0 / a) {
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("MapParams: alpha must lie in (0,1)");
    }
};

inline double apply_unchecked(const MapParams& params, double x) {
    return x <= 0.5 ? x * (1.0 + std::pow(2.0 * x, params.alpha)) : 2.0 * x - 1.0;
}

inline void check_state(double x) {
    if (!(x > 0.0) || x > 1.0)
        throw std::domain_error("map: point outside (0,1]");
}

inline double apply(const MapParams& params, double x) {
    check_state(x);
    return apply_unchecked(params, x);
}

// Unique x in (0,1/2] with T(x) = y; bracketed bisection to width 1e-12,
// then a few Newton steps, with a pure-bisection fallback if a step
// leaves the bracket.
double invert_left(const MapParams& params, double y);

// Inverse of the right branch: (y+1)/2 in (1/2,1].
inline double invert_right(double y) {
    check_state(y);
    return 0.5 * (y + 1.0);
}

// T^{-1}(b) split by branch; left part in (0,1/2], right part in (1/2,1].
struct PreimagePair {
    Interval left;
    Interval right;

    bool contains(double x) const { return left.contains(x) || right.contains(x); }
};

PreimagePair preimage_interval(const MapParams& params, const Interval& b);

// a_0 = 1/2, a_{j+1} = invert_left(a_j); strictly decreasing toward 0.
struct PartitionTable {
    std::vector<double> points;
};

PartitionTable partition_points(const MapParams& params, int k);

// visit(k, x_k) for k = 1..n along the forward orbit of x0.
template <class Visit>
void for_each_iterate(const MapParams& params, double x0, std::int64_t n, Visit&& visit) {
    check_state(x0);
    double x = x0;
    for (std::int64_t k = 1; k <= n; ++k) {
        x = apply_unchecked(params, x);
        visit(k, x);
    }
}

// Bit k (1-based) is 1 iff T^k(x0) lies in B_k. Single forward pass.
std::vector<std::uint8_t> iterate_hits(const MapParams& params, double x0,
                                       const IntervalSchedule& schedule, std::int64_t n);

} // namespace bclab
