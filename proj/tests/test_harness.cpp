#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bclab/experiment.hpp"
#include "bclab/map.hpp"
#include "bclab/series.hpp"

using namespace bclab;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.alpha = 0.5;
    cfg.schedule = fixed_schedule(Interval{0.5, 0.6}, 0.5);
    cfg.trajectories = 24;
    cfg.length = 1 << 12;
    cfg.ulam_bins = 512;
    cfg.seed = 7;
    return cfg;
}

} // namespace

TEST_CASE("schedules: kinds, membership, separation") {
    SUBCASE("kim arithmetic") {
        const IntervalSchedule s = kim_schedule(0.75);
        CHECK(s.kim_exponent == -4.0);
        CHECK(s.at(1).hi == 1.0);
        CHECK(s.at(2).hi == 0.0625);
        CHECK(s.at(10).hi == doctest::Approx(1e-4).epsilon(1e-12));
        CHECK(s.at(3).hi < s.at(2).hi);
        CHECK_FALSE(s.satisfies_separation());
    }
    SUBCASE("fixed separation") {
        CHECK(fixed_schedule(Interval{0.5, 0.6}, 0.5).satisfies_separation());
        CHECK_FALSE(fixed_schedule(Interval{0.5, 0.6}, 0.0).satisfies_separation());
        CHECK_FALSE(fixed_schedule(Interval{0.1, 0.6}, 0.2).satisfies_separation());
    }
    SUBCASE("listed cycles") {
        const IntervalSchedule s =
            listed_schedule({Interval{0.5, 0.6}, Interval{0.7, 0.8}}, 0.5);
        CHECK(s.at(1).lo == 0.5);
        CHECK(s.at(2).lo == 0.7);
        CHECK(s.at(3).lo == 0.5);
        CHECK(s.satisfies_separation());
    }
}

TEST_CASE("dyadic checkpoints") {
    const auto cps = dyadic_checkpoints(1 << 12);
    CHECK(cps == std::vector<std::int64_t>{1024, 2048, 4096});
    const auto odd = dyadic_checkpoints(5000);
    CHECK(odd == std::vector<std::int64_t>{1024, 2048, 4096, 5000});
    CHECK(dyadic_checkpoints(100) == std::vector<std::int64_t>{100});
}

TEST_CASE("run_sbc: schedule validation") {
    ExperimentConfig cfg = small_config();
    cfg.schedule = fixed_schedule(Interval{0.5, 0.6}, 0.0);
    CHECK_THROWS_AS(run_sbc(cfg), std::invalid_argument);
    cfg.schedule = kim_schedule(0.5);
    CHECK_THROWS_AS(run_sbc(cfg), std::invalid_argument);

    ExperimentConfig bad = small_config();
    bad.schedule = fixed_schedule(Interval{0.5, 0.6}, 0.5);
    CHECK_THROWS_AS(run_counterexample(bad), std::invalid_argument);
}

TEST_CASE("full-space schedule: every step hits and the measure is exactly one") {
    // S_n = n and E_n = n for B = (0,1]
    const MapParams p(0.5);
    const DensityEstimate D = stationary_density(build_ulam(p, 256, GridKind::geometric));
    CHECK(measure_interval(D, Interval{0.0, 1.0}) == 1.0);

    IntervalSchedule s;
    s.kind = ScheduleKind::fixed;
    s.fixed_interval = Interval{0.0, 1.0};
    const auto bits = iterate_hits(p, 0.37, s, 512);
    for (auto b : bits)
        CHECK(b == 1);
}

TEST_CASE("run_sbc: small run produces a coherent report") {
    ExperimentConfig cfg = small_config();
    const ExperimentReport rep = run_sbc(cfg);

    REQUIRE(rep.checkpoints.size() == 3);
    CHECK(rep.checkpoints.back() == cfg.length);
    CHECK(rep.aggregates.size() == rep.checkpoints.size());
    CHECK(static_cast<std::int64_t>(rep.trajectories.size()) == cfg.trajectories);
    CHECK(rep.residual_ok);

    // E at checkpoints is mu(B) * n for a fixed schedule
    const MapParams p(cfg.alpha);
    const DensityEstimate D =
        stationary_density(build_ulam(p, cfg.ulam_bins, cfg.grid, cfg.grid_floor));
    const double pb = measure_interval(D, Interval{0.5, 0.6});
    for (std::size_t c = 0; c < rep.checkpoints.size(); ++c)
        CHECK(rep.expected[c] ==
              doctest::Approx(pb * static_cast<double>(rep.checkpoints[c])).epsilon(1e-12));

    // ratios hover near 1 by the last checkpoint at this scale
    CHECK(rep.aggregates.back().median_ratio == doctest::Approx(1.0).epsilon(0.2));
    for (const TrajectorySummary& t : rep.trajectories)
        CHECK(t.tail_max_nonincreasing);
}

TEST_CASE("run_sbc: deterministic outputs, byte for byte") {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "bclab_det_test";
    fs::remove_all(base);

    ExperimentConfig cfg = small_config();
    cfg.trajectories = 8;
    cfg.out_dir = (base / "a").string();
    run_sbc(cfg);
    cfg.out_dir = (base / "b").string();
    run_sbc(cfg);

    CHECK(slurp(base / "a" / "report.json") == slurp(base / "b" / "report.json"));
    CHECK(slurp(base / "a" / "density.csv") == slurp(base / "b" / "density.csv"));
    for (int t = 0; t < 8; ++t) {
        const std::string name = "trajectory_" + std::to_string(t) + ".csv";
        CHECK(slurp(base / "a" / name) == slurp(base / "b" / name));
    }
    // a different seed changes the trajectories
    cfg.seed = 8;
    cfg.out_dir = (base / "c").string();
    run_sbc(cfg);
    CHECK(slurp(base / "a" / "trajectory_0.csv") != slurp(base / "c" / "trajectory_0.csv"));
    fs::remove_all(base);
}

TEST_CASE("run_sbc: looser envelope gives smaller normalized deviations") {
    ExperimentConfig cfg = small_config();
    cfg.eps = 0.1;
    const ExperimentReport tight = run_sbc(cfg);
    cfg.eps = 1.0;
    const ExperimentReport loose = run_sbc(cfg);
    REQUIRE(tight.trajectories.size() == loose.trajectories.size());
    for (std::size_t t = 0; t < tight.trajectories.size(); ++t)
        CHECK(loose.trajectories[t].max_abs_normalized <=
              tight.trajectories[t].max_abs_normalized + 1e-15);
}

TEST_CASE("ensemble means match the invariant measure") {
    const double alpha = 0.5;
    const MapParams p(alpha);
    const DensityEstimate D = stationary_density(build_ulam(p, 1 << 12, GridKind::geometric));
    const Interval B{0.5, 0.6};
    const double pb = measure_interval(D, B);
    const IntervalSchedule s = fixed_schedule(B, 0.5);

    const std::size_t T = 400, N = 1024;
    std::vector<std::int64_t> count(N, 0);
    const auto x0s = sample_mu(D, 31, T, SamplingMode::inverse_cdf, p);
    for (std::size_t t = 0; t < T; ++t) {
        const auto bits = iterate_hits(p, x0s[t], s, static_cast<std::int64_t>(N));
        for (std::size_t k = 0; k < N; ++k)
            count[k] += bits[k];
    }
    const double se = std::sqrt(pb * (1.0 - pb) / static_cast<double>(T));
    std::size_t inside = 0;
    for (std::size_t k = 0; k < N; ++k) {
        const double mean = static_cast<double>(count[k]) / static_cast<double>(T);
        if (std::abs(mean - pb) <= 4.0 * se)
            ++inside;
    }
    CHECK(static_cast<double>(inside) / static_cast<double>(N) >= 0.95);
}

TEST_CASE("run_pullback: exact identity on random separated intervals") {
    ExperimentConfig cfg;
    cfg.alpha = 0.5;
    cfg.trajectories = 10;
    cfg.length = 1000;
    cfg.pullback_intervals = 20;
    cfg.pullback_separation = 0.1;
    cfg.schedule = fixed_schedule(Interval{0.5, 1.0}, 0.5);
    const PullbackDiagnostic diag = run_pullback(cfg);
    CHECK(diag.steps_checked == 10 * 1000 * 20);
    CHECK(diag.identity_violations == 0);
    CHECK(diag.count_bound_violations == 0);
    CHECK(diag.pass());

    cfg.schedule = kim_schedule(0.5);
    CHECK_THROWS_AS(run_pullback(cfg), std::invalid_argument);
}

TEST_CASE("run_counterexample: kim pipeline extras") {
    ExperimentConfig cfg;
    cfg.alpha = 0.75;
    cfg.schedule = kim_schedule(0.75);
    cfg.trajectories = 30;
    cfg.length = 1 << 14;
    cfg.ulam_bins = 1024;
    cfg.seed = 11;
    const ExperimentReport rep = run_counterexample(cfg);

    CHECK(rep.expected_full > rep.expected_half); // divergence trend, strictly
    CHECK(rep.expected_full > 1.0);               // B_1 = (0,1] alone contributes 1
    CHECK(rep.fraction_zero_hits == 0.0);         // everyone hits at n = 1
    CHECK(rep.iqr_final_ratio > 0.0);
    CHECK(static_cast<std::int64_t>(rep.trajectories.size()) == cfg.trajectories);
}

TEST_CASE("listed schedule: streamed expectations match the prefix-sum oracle") {
    ExperimentConfig cfg = small_config();
    cfg.schedule = listed_schedule({Interval{0.5, 0.6}, Interval{0.7, 0.8}}, 0.5);
    cfg.trajectories = 4;
    const ExperimentReport rep = run_sbc(cfg);

    const MapParams p(cfg.alpha);
    const DensityEstimate D =
        stationary_density(build_ulam(p, cfg.ulam_bins, cfg.grid, cfg.grid_floor));
    EventProbabilities probs(static_cast<std::size_t>(cfg.length));
    for (std::int64_t k = 1; k <= cfg.length; ++k)
        probs[static_cast<std::size_t>(k - 1)] = measure_interval(D, cfg.schedule.at(k));
    const auto E = expected_counts(probs);
    for (std::size_t c = 0; c < rep.checkpoints.size(); ++c)
        CHECK(rep.expected[c] ==
              doctest::Approx(E[static_cast<std::size_t>(rep.checkpoints[c] - 1)])
                  .epsilon(1e-12));
}
