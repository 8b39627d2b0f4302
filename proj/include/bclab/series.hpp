#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace bclab {

// bits_1..bits_N for one trajectory
using HitSeries = std::vector<std::uint8_t>;

// p_1..p_N, here p_n = mu(B_n)
using EventProbabilities = std::vector<double>;

// S_n = sum_{k<=n} bits_k
std::vector<std::int64_t> cumulative_counts(const HitSeries& hits);

// E_n = sum_{k<=n} p_k
std::vector<double> expected_counts(const EventProbabilities& probs);

// Neumaier-compensated running sum; keeps increments far below one ulp of
// the total visible in the reported value.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

} // namespace bclab
