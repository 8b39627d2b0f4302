#pragma once

#include <stdexcept>

namespace bclab {

// Half-open interval (lo, hi] inside (0,1]; membership is lo < x <= hi.
// The half-open convention makes the two branch domains of the map a
// partition, so preimages of intervals are again exact intervals.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const { return lo < x && x <= hi; }
    double length() const { return hi - lo; }
    bool valid() const { return 0.0 <= lo && lo < hi && hi <= 1.0; }
};

inline Interval make_interval(double lo, double hi) {
    Interval b{lo, hi};
    if (!b.valid())
        throw std::invalid_argument("interval: need 0 <= lo < hi <= 1");
    return b;
}

} // namespace bclab
