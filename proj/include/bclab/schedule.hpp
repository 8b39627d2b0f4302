#pragma once

#include <cstdint>
#include <vector>

#include "bclab/interval.hpp"

namespace bclab {

enum class ScheduleKind { fixed, listed, kim };

// Rule generating the target sets B_n:
//   fixed  - B_n = b for all n
//   listed - B_n cycles through an explicit list
//   kim    - B_n = (0, n^{1/(alpha-1)}], hi decreasing in n
// `separation` is the lower bound d on the left endpoints; SBC runs
// require d > 0, the kim schedule has d = 0 by construction.
struct IntervalSchedule {
    ScheduleKind kind = ScheduleKind::fixed;
    Interval fixed_interval{0.5, 1.0};
    std::vector<Interval> listed;
    double kim_exponent = 0.0; // 1/(alpha-1), negative for alpha in (0,1)
    double separation = 0.0;

    Interval at(std::int64_t n) const;

    // true iff every interval the schedule can produce has lo >= separation > 0
    bool satisfies_separation() const;
};

IntervalSchedule fixed_schedule(const Interval& b, double d);
IntervalSchedule listed_schedule(std::vector<Interval> bs, double d);
IntervalSchedule kim_schedule(double alpha);

} // namespace bclab
