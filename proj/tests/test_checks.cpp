#include <doctest.h>

#include <cmath>

#include "bclab/ensemble_checks.hpp"
#include "bclab/envelopes.hpp"
#include "oracles.hpp"

using namespace bclab;

namespace {

GrowthFunction linear_growth() { return GrowthFunction{[](double x) { return x; }, 0.5}; }

} // namespace

TEST_CASE("empirical_variance_check on an iid oracle") {
    const double p = 0.3;
    const auto ensemble = oracles::bernoulli_ensemble(p, 2000, 1000, 21);
    const EventProbabilities probs(1000, p);
    const std::vector<std::pair<std::int64_t, std::int64_t>> pairs{
        {0, 1000}, {0, 500}, {250, 750}, {100, 900}};

    const VarianceDiagnostic diag = empirical_variance_check(ensemble, probs, pairs,
                                                             linear_growth());
    // Var(S_m - S_n) = (m-n) p (1-p), so the ratio to E_m - E_n is 1 - p
    for (const auto& row : diag.pairs) {
        REQUIRE_FALSE(row.skipped);
        CHECK(row.ratio == doctest::Approx(1.0 - p).epsilon(0.08));
        CHECK(row.ratio_se > 0.0);
    }
    CHECK(diag.consistent);
    CHECK(diag.n0 == 34); // first n with E_n = 0.3 n >= 10
}

TEST_CASE("empirical_variance_check: degenerate and constant cases") {
    SUBCASE("constant bits have zero variance") {
        std::vector<HitSeries> ensemble(50, HitSeries(100, 1));
        const EventProbabilities probs(100, 1.0);
        const VarianceDiagnostic diag = empirical_variance_check(
            ensemble, probs, {{0, 100}}, linear_growth(), 0);
        CHECK(diag.pairs[0].variance == 0.0);
        CHECK(diag.pairs[0].ratio == 0.0);
        CHECK(diag.consistent);
    }
    SUBCASE("degenerate window is skipped with notice") {
        auto ensemble = oracles::bernoulli_ensemble(0.5, 50, 100, 3);
        EventProbabilities probs(100, 0.5);
        probs[10] = 0.0; // E_11 == E_10
        const VarianceDiagnostic diag = empirical_variance_check(
            ensemble, probs, {{10, 11}}, linear_growth(), 0);
        CHECK(diag.pairs[0].skipped);
        CHECK(diag.consistent);
    }
}

TEST_CASE("pairwise_correlation_check: independent streams pass a zero certificate") {
    const double p = 0.3;
    const auto ensemble = oracles::bernoulli_ensemble(p, 5000, 64, 77);
    const EventProbabilities probs(64, p);
    CorrelationCertificate zero;
    zero.c = [](double) { return 0.0; };
    zero.b = [](double) { return 0.0; };

    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (std::int64_t gap : {1, 2, 4, 8, 16, 32})
        for (std::int64_t j = 1; j + gap <= 64; j += 7)
            pairs.emplace_back(j, j + gap);

    const CorrelationDiagnostic diag =
        pairwise_correlation_check(ensemble, probs, zero, pairs);
    CHECK(diag.inconclusive == 0);
    CHECK(diag.pass_fraction >= 0.9);
}

TEST_CASE("pairwise_correlation_check: coupled events violate a small certificate") {
    // A_i == A_j exactly: joint = 0.3 far above 0.09
    const double p = 0.3;
    std::vector<HitSeries> ensemble;
    Rng rng(5);
    for (int t = 0; t < 4000; ++t) {
        const std::uint8_t bit = rng.unit() < p ? 1 : 0;
        ensemble.push_back(HitSeries(8, bit));
    }
    const EventProbabilities probs(8, p);
    CorrelationCertificate small;
    small.c = [](double) { return 0.01; };
    small.b = [](double) { return 0.001; };
    const CorrelationDiagnostic diag =
        pairwise_correlation_check(ensemble, probs, small, {{1, 4}, {2, 7}});
    CHECK(diag.violations == 2);
    CHECK(diag.pass_fraction == 0.0);
}

TEST_CASE("pairwise_correlation_check: underpowered pairs are inconclusive, never passes") {
    const double p = 0.05; // needs 100/(0.05^2) = 40000 trajectories
    const auto ensemble = oracles::bernoulli_ensemble(p, 500, 16, 9);
    const EventProbabilities probs(16, p);
    CorrelationCertificate zero;
    zero.c = [](double) { return 0.0; };
    zero.b = [](double) { return 0.0; };
    const CorrelationDiagnostic diag =
        pairwise_correlation_check(ensemble, probs, zero, {{1, 2}, {3, 9}});
    CHECK(diag.inconclusive == 2);
    CHECK(diag.passes == 0);
}

TEST_CASE("theorem-1 pipeline on the iid oracle: envelope dominates CLT fluctuations") {
    const double p = 0.3;
    const std::size_t N = 100000, T = 200;
    const auto ensemble = oracles::bernoulli_ensemble(p, T, N, 123);
    const double EN = p * static_cast<double>(N);
    const double env = envelope_corollary1_at(EN, 0.0, 1.0);
    REQUIRE(env > 0.0);
    double worst = 0.0;
    for (const HitSeries& bits : ensemble) {
        std::int64_t s = 0;
        for (std::uint8_t b : bits)
            s += b;
        worst = std::max(worst, std::abs(static_cast<double>(s) - EN) / env);
    }
    CHECK(worst <= 1.0);
}
