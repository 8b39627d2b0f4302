#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bclab/ensemble_checks.hpp"
#include "bclab/schedule.hpp"
#include "bclab/ulam.hpp"

namespace bclab {

struct ExperimentConfig {
    double alpha = 0.5;
    IntervalSchedule schedule = fixed_schedule(Interval{0.5, 1.0}, 0.5);
    std::int64_t trajectories = 200;
    std::int64_t length = 1 << 20;
    SamplingMode sampling = SamplingMode::inverse_cdf;
    std::uint64_t seed = 7;
    std::size_t ulam_bins = 4096;
    GridKind grid = GridKind::geometric;
    double grid_floor = 1e-5;
    double gamma = -1.0; // < 0 means: use alpha
    double eps = 0.1;
    double power_tol = 1e-10;
    std::int64_t power_max_iter = 100000;
    int burn_in_steps = 1000;
    int residual_probes = 100;
    double residual_tol = 1e-3;
    int pullback_intervals = 20;
    double pullback_separation = 0.1;
    std::string out_dir; // empty: nothing written

    double envelope_gamma() const { return gamma < 0.0 ? alpha : gamma; }
};

struct CheckpointAggregate {
    std::int64_t n = 0;
    double expected = 0.0;
    double median_ratio = 0.0;
    double q25_ratio = 0.0;
    double q75_ratio = 0.0;
    double median_abs_ratio_err = 0.0; // median |S/E - 1|
    double median_abs_normalized = 0.0;
    double max_abs_normalized = 0.0;
};

struct TrajectorySummary {
    std::int64_t index = 0;
    std::int64_t final_count = 0;
    double final_ratio = 0.0;
    double max_abs_normalized = 0.0; // over checkpoints with E > e^e
    bool envelope_dominated = true;  // |nd| <= 1 at every such checkpoint
    bool tail_max_nonincreasing = true;
};

struct ExperimentReport {
    double density_residual = 0.0;
    std::int64_t power_iterations = 0;
    double power_residual = 0.0;
    std::vector<std::int64_t> checkpoints;
    std::vector<double> expected; // E at checkpoints
    std::vector<CheckpointAggregate> aggregates;
    std::vector<TrajectorySummary> trajectories;
    // ensemble-level verdicts
    bool residual_ok = true;
    bool ratios_converging = false;
    double envelope_dominated_fraction = 0.0;
    double tail_monotone_fraction = 0.0;
    // counterexample extras (kim schedule only)
    double iqr_final_ratio = 0.0;
    double fraction_zero_hits = 0.0;
    double expected_half = 0.0; // E_{N/2}
    double expected_full = 0.0; // E_N
    // wall time is logged, never serialized (reports must be byte-stable)
    double wall_seconds = 0.0;
};

// Full pipeline: invariant density, mu-sampled starting points, hit series
// per trajectory, deviations against the Corollary-1 envelope with
// gamma = alpha by default. Rejects schedules without positive separation.
ExperimentReport run_sbc(const ExperimentConfig& config);

// Same pipeline on the kim schedule; additionally reports the dispersion of
// S_N/E_N and the fraction of trajectories that never hit.
ExperimentReport run_counterexample(const ExperimentConfig& config);

struct PullbackDiagnostic {
    std::int64_t steps_checked = 0;
    std::int64_t identity_violations = 0;
    std::int64_t count_bound_violations = 0; // |S^1_n - S_{n+1}| > 1
    bool pass() const { return identity_violations == 0 && count_bound_violations == 0; }
};

// Verifies, per trajectory and per step, the exact identity
//   indicator(T^k x in T^{-1} B) == indicator(T^{k+1} x in B)
// over random intervals B in (d,1], plus the count bound
//   S_{n+1} - 1 <= S_n^1 <= S_{n+1}.
PullbackDiagnostic run_pullback(const ExperimentConfig& config);

struct CorrelationStudyResult {
    CorrelationDiagnostic diagnostic;
    double beta = 0.0;
    double mu_b = 0.0;
    double implied_c1 = 0.0;    // sup over gaps of excess * gap^{beta-1}
    double implied_big_c = 0.0; // sup remainder * gap^beta / p
    bool inconclusive = false;
};

// Pairwise-correlation study over the listed gaps for a fixed interval in
// (1/2,1]; emits the fitted decay exponent and implied certificate constants.
CorrelationStudyResult run_correlation_study(const ExperimentConfig& config,
                                             const std::vector<std::int64_t>& gaps);

std::vector<std::int64_t> dyadic_checkpoints(std::int64_t n);

// report.json / trajectory_<i>.csv / density.csv writers; deterministic for a
// fixed config and seed.
void write_report_json(const ExperimentReport& report, const ExperimentConfig& config,
                       const std::string& path);

} // namespace bclab
