#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bclab/growth.hpp"
#include "bclab/series.hpp"

namespace bclab {

struct VariancePairResult {
    std::int64_t n = 0;
    std::int64_t m = 0;
    double window_expectation = 0.0; // E_m - E_n
    double variance = 0.0;           // sample Var(S_m - S_n) across the ensemble
    double ratio = 0.0;              // variance / g(E_m - E_n)
    double ratio_se = 0.0;           // jackknife standard error of the ratio
    bool skipped = false;            // degenerate window (E_m == E_n)
};

struct VarianceDiagnostic {
    std::vector<VariancePairResult> pairs;
    std::int64_t n0 = 0;     // pairs with n < n0 are excluded from the verdict
    bool consistent = true;  // ratio <= 1 + 3 SE for all counted pairs
    double max_ratio = 0.0;  // implied constant over counted pairs
};

// Estimates Var(S_m - S_n) across trajectories for each (n, m) pair and
// compares with g(E_m - E_n). n0 < 0 selects the first n with E_n >= 10.
VarianceDiagnostic empirical_variance_check(
    const std::vector<HitSeries>& ensemble, const EventProbabilities& probs,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs, const GrowthFunction& g,
    std::int64_t n0 = -1);

enum class PairVerdict { pass, violation, inconclusive };

struct CorrelationPairResult {
    std::int64_t j = 0; // earlier index
    std::int64_t i = 0; // later index, i > j
    double joint = 0.0; // empirical P(A_j A_i)
    double bound = 0.0; // certificate right-hand side
    double margin = 0.0;
    PairVerdict verdict = PairVerdict::pass;
};

struct GapExcess {
    std::int64_t gap = 0;
    double excess = 0.0; // mean over pairs of joint/(p_j p_i) - 1
    double se = 0.0;
    bool usable = false; // |excess| resolvable above noise
};

struct CorrelationDiagnostic {
    std::vector<CorrelationPairResult> pairs;
    std::vector<GapExcess> by_gap;
    std::int64_t passes = 0;
    std::int64_t violations = 0;
    std::int64_t inconclusive = 0;
    double pass_fraction = 0.0;
    LogLogFit decay; // fit of log|excess| against log(gap)
};

// Verifies the certificate inequality pair by pair with a one-sided binomial
// margin (z-quantile), and fits the decay of the excess correlation against
// the gap. Underpowered pairs (fewer than 100/(p_i p_j) trajectories) are
// reported inconclusive, never as passes.
CorrelationDiagnostic pairwise_correlation_check(
    const std::vector<HitSeries>& ensemble, const EventProbabilities& probs,
    const CorrelationCertificate& cert,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& index_pairs, double z = 2.326);

} // namespace bclab
