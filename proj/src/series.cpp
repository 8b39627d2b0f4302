#include "bclab/series.hpp"

#include <stdexcept>

namespace bclab {

std::vector<std::int64_t> cumulative_counts(const HitSeries& hits) {
    if (hits.empty())
        throw std::invalid_argument("cumulative_counts: empty series");
    std::vector<std::int64_t> s(hits.size());
    std::int64_t acc = 0;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        acc += hits[k];
        s[k] = acc;
    }
    return s;
}

std::vector<double> expected_counts(const EventProbabilities& probs) {
    if (probs.empty())
        throw std::invalid_argument("expected_counts: empty series");
    std::vector<double> e(probs.size());
    KahanSum acc;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc.add(probs[k]);
        e[k] = acc.value();
    }
    return e;
}

} // namespace bclab
