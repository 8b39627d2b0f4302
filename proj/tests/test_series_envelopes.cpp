#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bclab/deviation.hpp"
#include "bclab/envelopes.hpp"
#include "bclab/series.hpp"
#include "oracles.hpp"

using namespace bclab;

TEST_CASE("cumulative_counts and expected_counts: direct values") {
    CHECK(cumulative_counts({1, 0, 1}) == std::vector<std::int64_t>{1, 1, 2});
    CHECK(cumulative_counts({0, 0, 0, 0}) == std::vector<std::int64_t>{0, 0, 0, 0});
    const auto ones = cumulative_counts(HitSeries(17, 1));
    CHECK(ones.back() == 17);

    const auto e = expected_counts(EventProbabilities(10, 0.3));
    CHECK(e.back() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(expected_counts({0.0, 0.0, 0.0}) == std::vector<double>{0.0, 0.0, 0.0});

    CHECK_THROWS_AS(cumulative_counts({}), std::invalid_argument);
    CHECK_THROWS_AS(expected_counts({}), std::invalid_argument);
}

TEST_CASE("prefix sums agree with naive re-summation") {
    Rng rng(5);
    HitSeries bits(1000);
    EventProbabilities probs(1000);
    for (std::size_t k = 0; k < bits.size(); ++k) {
        bits[k] = rng.unit() < 0.4 ? 1 : 0;
        probs[k] = rng.unit();
    }
    CHECK(cumulative_counts(bits) == oracles::prefix_counts_naive(bits));
    const auto e = expected_counts(probs);
    const auto ref = oracles::prefix_sums_naive(probs);
    for (std::size_t k = 0; k < e.size(); ++k)
        CHECK(e[k] == doctest::Approx(ref[k]).epsilon(1e-12));
}

TEST_CASE("KahanSum keeps sub-ulp increments visible") {
    KahanSum acc;
    acc.add(1.0);
    for (int k = 0; k < 1000000; ++k)
        acc.add(1e-20);
    CHECK(acc.value() > 1.0);
    CHECK(acc.value() == doctest::Approx(1.0 + 1e-14).epsilon(1e-6));
}

TEST_CASE("envelope_theorem1: direct evaluation and domain markers") {
    GrowthFunction g{[](double x) { return x; }, 0.5};
    WeightFunction one{[](double) { return 1.0; }};

    const double e2 = std::exp(2.0);
    // sqrt(e^2 * 1) * 2^{3/2}
    CHECK(envelope_theorem1_at(e2, g, one) ==
          doctest::Approx(std::exp(1.0) * std::pow(2.0, 1.5)).epsilon(1e-14));

    CHECK(std::isnan(envelope_theorem1_at(1.0, g, one)));
    CHECK(std::isnan(envelope_theorem1_at(0.5, g, one)));

    // nondecreasing in E for valid g, psi
    double prev = 0.0;
    for (double e = 1.5; e < 1e9; e *= 3.0) {
        const double v = envelope_theorem1_at(e, g, one);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("envelope_corollary1: frozen high-precision value and shape") {
    // E = e^{e^2}, gamma = 0, eps = 1: frozen from a 40-digit evaluation
    const double E = std::exp(std::exp(2.0));
    CHECK(envelope_corollary1_at(E, 0.0, 1.0) ==
          doctest::Approx(1615.9450423004102832).epsilon(1e-13));

    CHECK(std::isnan(envelope_corollary1_at(std::exp(1.0), 0.0, 1.0)));
    CHECK(std::isnan(envelope_corollary1_at(2.0, 0.0, 1.0)));

    // monotone in gamma
    for (double e : {10.0, 1e3, 1e6}) {
        CHECK(envelope_corollary1_at(e, 0.0, 1.0) <= envelope_corollary1_at(e, 0.5, 1.0));
    }
    // envelope / E decays along the tail of a log grid up to 1e12 (the
    // polylog factors dominate first, the power E^{(gamma-1)/2} wins later)
    for (double gamma : {0.0, 0.5}) {
        double prev_ratio = 1e300;
        for (double e = 1e6; e <= 1e12; e *= 10.0) {
            const double ratio = envelope_corollary1_at(e, gamma, 1.0) / e;
            CHECK(ratio < prev_ratio);
            prev_ratio = ratio;
        }
        CHECK(prev_ratio < (gamma == 0.0 ? 1e-3 : 0.6));
    }
}

TEST_CASE("theorem-1 envelope specializes to the corollary-1 envelope") {
    // g(x) = x^{1+gamma}, psi(x) = (log(e+x))^{1+eps}: same envelope up to a
    // bounded factor on E in [e^2, 1e12]
    for (double gamma : {0.0, 0.5}) {
        for (double eps : {0.1, 0.5}) {
            GrowthFunction g{[gamma](double x) { return std::pow(x, 1.0 + gamma); }, 0.5};
            WeightFunction psi{[eps](double x) {
                return std::pow(std::log(std::exp(1.0) + x), 1.0 + eps);
            }};
            for (double E = std::exp(2.0); E <= 1e12; E *= 4.0) {
                const double a = envelope_theorem1_at(E, g, psi);
                const double b = envelope_corollary1_at(E, gamma, eps);
                CHECK(a / b >= 0.5);
                CHECK(a / b <= 2.0);
            }
        }
    }
}

TEST_CASE("deviation_report: exact and shifted series") {
    const std::vector<double> E{10.0, 20.0, 40.0, 80.0};
    const std::vector<double> env{5.0, 6.0, 7.0, 8.0};

    SUBCASE("S = E") {
        const DeviationReport r = deviation_report(E, E, env);
        for (double v : r.ratio)
            CHECK(v == 1.0);
        for (double v : r.normalized)
            CHECK(v == 0.0);
        CHECK(r.last_ratio == 1.0);
        CHECK(r.tail_max_abs_normalized == 0.0);
    }
    SUBCASE("S = E + envelope") {
        std::vector<double> S(E.size());
        for (std::size_t k = 0; k < E.size(); ++k)
            S[k] = E[k] + env[k];
        const DeviationReport r = deviation_report(S, E, env);
        for (double v : r.normalized)
            CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.tail_max_abs_normalized == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("undefined entries are NaN") {
        const DeviationReport r =
            deviation_report({1.0, 2.0}, {0.0, 1.0}, {std::nan(""), 2.0});
        CHECK(std::isnan(r.ratio[0]));
        CHECK(std::isnan(r.normalized[0]));
        CHECK(r.ratio[1] == 2.0);
        CHECK(r.normalized[1] == 0.5);
    }
    SUBCASE("length mismatch rejected") {
        const std::vector<double> one{1.0}, two{1.0, 2.0};
        CHECK_THROWS_AS(deviation_report(one, two, one), std::invalid_argument);
    }
}
