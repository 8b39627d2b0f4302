#pragma once

// Independent test oracles, kept deliberately naive: plain bisection for the
// left-branch inverse, quadratic re-summation for prefix sums, midpoint
// quadrature for interval overlaps, and a seeded Bernoulli ensemble
// generator. None of these share code with the implementation they check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "bclab/rng.hpp"
#include "bclab/series.hpp"

namespace oracles {

// Bisection-only solve of x * (1 + (2x)^alpha) = y on (0, 1/2].
inline double invert_left_bisect(double alpha, double y) {
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid * (1.0 + std::pow(2.0 * mid, alpha)) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline std::vector<std::int64_t> prefix_counts_naive(const std::vector<std::uint8_t>& bits) {
    std::vector<std::int64_t> s(bits.size());
    for (std::size_t n = 0; n < bits.size(); ++n) {
        std::int64_t acc = 0;
        for (std::size_t k = 0; k <= n; ++k)
            acc += bits[k];
        s[n] = acc;
    }
    return s;
}

inline std::vector<double> prefix_sums_naive(const std::vector<double>& p) {
    std::vector<double> e(p.size());
    for (std::size_t n = 0; n < p.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= n; ++k)
            acc += p[k];
        e[n] = acc;
    }
    return e;
}

// Midpoint-rule length of {x in (lo,hi] : T_alpha(x) in (blo,bhi]}.
inline double overlap_quadrature(double alpha, double lo, double hi, double blo, double bhi,
                                 int cells = 200000) {
    double acc = 0.0;
    const double h = (hi - lo) / cells;
    for (int k = 0; k < cells; ++k) {
        const double x = lo + (k + 0.5) * h;
        const double tx = x <= 0.5 ? x * (1.0 + std::pow(2.0 * x, alpha)) : 2.0 * x - 1.0;
        if (blo < tx && tx <= bhi)
            acc += h;
    }
    return acc;
}

inline std::vector<bclab::HitSeries> bernoulli_ensemble(double p, std::size_t trajectories,
                                                        std::size_t length, std::uint64_t seed) {
    std::vector<bclab::HitSeries> out(trajectories);
    for (std::size_t t = 0; t < trajectories; ++t) {
        bclab::Rng rng(bclab::derive_seed(seed, t));
        bclab::HitSeries bits(length);
        for (std::size_t k = 0; k < length; ++k)
            bits[k] = rng.unit() < p ? 1 : 0;
        out[t] = std::move(bits);
    }
    return out;
}

} // namespace oracles
