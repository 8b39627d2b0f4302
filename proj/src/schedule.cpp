#include "bclab/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace bclab {

Interval IntervalSchedule::at(std::int64_t n) const {
    switch (kind) {
    case ScheduleKind::fixed:
        return fixed_interval;
    case ScheduleKind::listed:
        return listed[static_cast<std::size_t>((n - 1) % static_cast<std::int64_t>(listed.size()))];
    case ScheduleKind::kim:
        return Interval{0.0, std::pow(static_cast<double>(n), kim_exponent)};
    }
    return fixed_interval;
}

bool IntervalSchedule::satisfies_separation() const {
    if (!(separation > 0.0))
        return false;
    if (kind == ScheduleKind::kim)
        return false; // left endpoints sit at zero
    if (kind == ScheduleKind::fixed)
        return fixed_interval.lo >= separation;
    for (const Interval& b : listed)
        if (b.lo < separation)
            return false;
    return true;
}

IntervalSchedule fixed_schedule(const Interval& b, double d) {
    if (!b.valid())
        throw std::invalid_argument("fixed_schedule: invalid interval");
    IntervalSchedule s;
    s.kind = ScheduleKind::fixed;
    s.fixed_interval = b;
    s.separation = d;
    return s;
}

IntervalSchedule listed_schedule(std::vector<Interval> bs, double d) {
    if (bs.empty())
        throw std::invalid_argument("listed_schedule: empty list");
    for (const Interval& b : bs)
        if (!b.valid())
            throw std::invalid_argument("listed_schedule: invalid interval");
    IntervalSchedule s;
    s.kind = ScheduleKind::listed;
    s.listed = std::move(bs);
    s.separation = d;
    return s;
}

IntervalSchedule kim_schedule(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("kim_schedule: alpha must lie in (0,1)");
    IntervalSchedule s;
    s.kind = ScheduleKind::kim;
    s.kim_exponent = 1.0 / (alpha - 1.0);
    s.separation = 0.0;
    return s;
}

} // namespace bclab
