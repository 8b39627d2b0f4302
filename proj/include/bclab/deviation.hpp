#pragma once

#include <string>
#include <vector>

namespace bclab {

// Per-n view of S_n against E_n and an envelope: ratios S/E and normalized
// deviations (S - E)/envelope, NaN where a quantity is undefined.
struct DeviationReport {
    std::vector<double> s;
    std::vector<double> e;
    std::vector<double> ratio;
    std::vector<double> envelope;
    std::vector<double> normalized;
    double tail_max_abs_normalized = 0.0; // over the last half of defined entries
    double last_ratio = 0.0;
};

DeviationReport deviation_report(const std::vector<double>& S, const std::vector<double>& E,
                                 const std::vector<double>& envelope);

// CSV with columns n, S_n, E_n, ratio, envelope, normalized_deviation.
void write_deviation_csv(const DeviationReport& r, const std::string& path);

} // namespace bclab
