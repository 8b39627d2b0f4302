#include "bclab/ensemble_checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace bclab {

namespace {

void check_ensemble(const std::vector<HitSeries>& ensemble, const EventProbabilities& probs) {
    if (ensemble.empty())
        throw std::invalid_argument("ensemble checks: empty ensemble");
    for (const HitSeries& h : ensemble)
        if (h.size() != probs.size())
            throw std::invalid_argument("ensemble checks: series/probs length mismatch");
}

} // namespace

VarianceDiagnostic empirical_variance_check(
    const std::vector<HitSeries>& ensemble, const EventProbabilities& probs,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs, const GrowthFunction& g,
    std::int64_t n0) {
    check_ensemble(ensemble, probs);
    const std::int64_t N = static_cast<std::int64_t>(probs.size());
    const std::size_t T = ensemble.size();
    if (T < 2)
        throw std::invalid_argument("empirical_variance_check: need >= 2 trajectories");

    const std::vector<double> E = expected_counts(probs);
    auto e_at = [&](std::int64_t n) { return n <= 0 ? 0.0 : E[static_cast<std::size_t>(n - 1)]; };

    VarianceDiagnostic diag;
    if (n0 < 0) {
        n0 = N + 1;
        for (std::int64_t n = 1; n <= N; ++n)
            if (e_at(n) >= 10.0) {
                n0 = n;
                break;
            }
    }
    diag.n0 = n0;

    for (const auto& [n, m] : pairs) {
        if (!(0 <= n && n < m && m <= N))
            throw std::invalid_argument("empirical_variance_check: bad pair");
        VariancePairResult row;
        row.n = n;
        row.m = m;
        row.window_expectation = e_at(m) - e_at(n);
        if (!(row.window_expectation > 0.0)) {
            row.skipped = true; // degenerate window, noted and excluded
            diag.pairs.push_back(row);
            continue;
        }
        double s1 = 0.0, s2 = 0.0;
        std::vector<double> d(T);
        for (std::size_t t = 0; t < T; ++t) {
            std::int64_t acc = 0;
            const HitSeries& bits = ensemble[t];
            for (std::int64_t k = n; k < m; ++k)
                acc += bits[static_cast<std::size_t>(k)];
            d[t] = static_cast<double>(acc);
            s1 += d[t];
            s2 += d[t] * d[t];
        }
        const double Tn = static_cast<double>(T);
        row.variance = (s2 - s1 * s1 / Tn) / (Tn - 1.0);
        const double gE = g(row.window_expectation);
        row.ratio = row.variance / gE;

        // jackknife over trajectories
        double loo_sum = 0.0, loo_sq = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const double s1t = s1 - d[t];
            const double s2t = s2 - d[t] * d[t];
            const double var_t = (s2t - s1t * s1t / (Tn - 1.0)) / (Tn - 2.0);
            loo_sum += var_t;
            loo_sq += var_t * var_t;
        }
        const double loo_mean = loo_sum / Tn;
        const double jack_var = (Tn - 1.0) / Tn * (loo_sq - Tn * loo_mean * loo_mean);
        row.ratio_se = std::sqrt(std::max(jack_var, 0.0)) / gE;

        if (row.n >= n0) {
            diag.max_ratio = std::max(diag.max_ratio, row.ratio);
            if (row.ratio > 1.0 + 3.0 * row.ratio_se)
                diag.consistent = false;
        }
        diag.pairs.push_back(row);
    }
    return diag;
}

CorrelationDiagnostic pairwise_correlation_check(
    const std::vector<HitSeries>& ensemble, const EventProbabilities& probs,
    const CorrelationCertificate& cert,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& index_pairs, double z) {
    check_ensemble(ensemble, probs);
    const std::int64_t N = static_cast<std::int64_t>(probs.size());
    const double T = static_cast<double>(ensemble.size());

    CorrelationDiagnostic diag;
    std::map<std::int64_t, std::vector<std::size_t>> gap_members;

    for (const auto& [j, i] : index_pairs) {
        if (!(1 <= j && j < i && i <= N))
            throw std::invalid_argument("pairwise_correlation_check: bad pair");
        CorrelationPairResult row;
        row.j = j;
        row.i = i;
        const double pj = probs[static_cast<std::size_t>(j - 1)];
        const double pi = probs[static_cast<std::size_t>(i - 1)];
        const double gap = static_cast<double>(i - j);

        std::int64_t hits = 0;
        for (const HitSeries& bits : ensemble)
            hits += bits[static_cast<std::size_t>(j - 1)] & bits[static_cast<std::size_t>(i - 1)];
        row.joint = static_cast<double>(hits) / T;
        row.bound = (1.0 + cert.c(gap)) * pj * pi + cert.b(gap) * pj;
        row.margin = z * std::sqrt(std::max(row.joint * (1.0 - row.joint), 0.0) / T);

        const bool underpowered = pi * pj <= 0.0 || T < 100.0 / (pi * pj);
        if (underpowered)
            row.verdict = PairVerdict::inconclusive;
        else
            row.verdict =
                row.joint <= row.bound + row.margin ? PairVerdict::pass : PairVerdict::violation;

        switch (row.verdict) {
        case PairVerdict::pass: ++diag.passes; break;
        case PairVerdict::violation: ++diag.violations; break;
        case PairVerdict::inconclusive: ++diag.inconclusive; break;
        }
        gap_members[i - j].push_back(diag.pairs.size());
        diag.pairs.push_back(row);
    }
    const std::size_t total = diag.pairs.size();
    diag.pass_fraction = total == 0 ? 0.0 : static_cast<double>(diag.passes) / total;

    std::vector<double> fit_x, fit_y;
    for (const auto& [gap, members] : gap_members) {
        GapExcess ge;
        ge.gap = gap;
        double acc = 0.0, var_acc = 0.0;
        for (std::size_t idx : members) {
            const CorrelationPairResult& row = diag.pairs[idx];
            const double pj = probs[static_cast<std::size_t>(row.j - 1)];
            const double pi = probs[static_cast<std::size_t>(row.i - 1)];
            const double denom = pj * pi;
            acc += row.joint / denom - 1.0;
            const double se_pair = std::sqrt(std::max(row.joint * (1.0 - row.joint), 0.0) / T);
            var_acc += se_pair * se_pair / (denom * denom);
        }
        const double cnt = static_cast<double>(members.size());
        ge.excess = acc / cnt;
        ge.se = std::sqrt(var_acc) / cnt;
        ge.usable = std::abs(ge.excess) > 2.0 * ge.se && ge.excess != 0.0;
        if (ge.usable) {
            fit_x.push_back(static_cast<double>(ge.gap));
            fit_y.push_back(ge.excess);
        }
        diag.by_gap.push_back(ge);
    }
    diag.decay = fit_loglog_decay(fit_x, fit_y);
    return diag;
}

} // namespace bclab
