#include "bclab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "bclab/deviation.hpp"
#include "bclab/envelopes.hpp"
#include "bclab/rng.hpp"
#include "bclab/series.hpp"

namespace bclab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kEE = std::exp(std::exp(1.0)); // envelope gate: entries need E > e^e

double quantile(std::vector<double> v, double q) {
    if (v.empty())
        return kNaN;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size())
        return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

struct Pipeline {
    MapParams params;
    DensityEstimate density;
    double residual = 0.0;
    std::vector<std::int64_t> cps;
    std::vector<double> e_at;
    std::vector<double> env_at;
    double e_half = 0.0;
    double e_full = 0.0;
    std::vector<double> kim_his; // per-step right endpoints for the kim schedule
};

Pipeline prepare(const ExperimentConfig& cfg) {
    Pipeline p{MapParams(cfg.alpha)};
    const UlamDiscretization U = build_ulam(p.params, cfg.ulam_bins, cfg.grid, cfg.grid_floor);
    p.density = stationary_density(U, cfg.power_tol, cfg.power_max_iter);
    p.residual =
        invariance_residual(p.density, p.params, cfg.residual_probes, derive_seed(cfg.seed, 1u));
    p.cps = dyadic_checkpoints(cfg.length);

    const std::int64_t N = cfg.length;
    const std::int64_t half = N / 2;
    if (cfg.schedule.kind == ScheduleKind::fixed) {
        const double pb = measure_interval(p.density, cfg.schedule.fixed_interval);
        for (std::int64_t n : p.cps)
            p.e_at.push_back(pb * static_cast<double>(n));
        p.e_half = pb * static_cast<double>(half);
        p.e_full = pb * static_cast<double>(N);
    } else {
        if (cfg.schedule.kind == ScheduleKind::kim) {
            p.kim_his.assign(static_cast<std::size_t>(N) + 1, 0.0);
            for (std::int64_t k = 1; k <= N; ++k)
                p.kim_his[static_cast<std::size_t>(k)] =
                    std::min(std::pow(static_cast<double>(k), cfg.schedule.kim_exponent), 1.0);
        }
        KahanSum acc; // keeps the tiny tail increments of E_n visible
        std::size_t cp = 0;
        for (std::int64_t k = 1; k <= N; ++k) {
            const Interval b = cfg.schedule.kind == ScheduleKind::kim
                                   ? Interval{0.0, p.kim_his[static_cast<std::size_t>(k)]}
                                   : cfg.schedule.at(k);
            acc.add(measure_interval(p.density, b));
            if (k == half)
                p.e_half = acc.value();
            if (cp < p.cps.size() && k == p.cps[cp]) {
                p.e_at.push_back(acc.value());
                ++cp;
            }
        }
        p.e_full = acc.value();
    }
    for (double e : p.e_at)
        p.env_at.push_back(envelope_corollary1_at(e, cfg.envelope_gamma(), cfg.eps));
    return p;
}

std::vector<std::int64_t> simulate_counts(const ExperimentConfig& cfg, const Pipeline& p,
                                          std::int64_t traj, std::int64_t* final_count) {
    const double x0 = sample_mu(p.density, derive_seed(cfg.seed, 1000 + traj), 1, cfg.sampling,
                                p.params, cfg.burn_in_steps)[0];
    std::vector<std::int64_t> s_at(p.cps.size(), 0);
    std::int64_t S = 0;
    std::size_t cp = 0;
    double x = x0;
    if (cfg.schedule.kind == ScheduleKind::fixed) {
        const Interval B = cfg.schedule.fixed_interval;
        for (std::int64_t k = 1; k <= cfg.length; ++k) {
            x = apply_unchecked(p.params, x);
            S += (B.lo < x && x <= B.hi) ? 1 : 0;
            if (cp < p.cps.size() && k == p.cps[cp])
                s_at[cp++] = S;
        }
    } else if (cfg.schedule.kind == ScheduleKind::kim) {
        for (std::int64_t k = 1; k <= cfg.length; ++k) {
            x = apply_unchecked(p.params, x);
            S += x <= p.kim_his[static_cast<std::size_t>(k)] ? 1 : 0;
            if (cp < p.cps.size() && k == p.cps[cp])
                s_at[cp++] = S;
        }
    } else {
        for (std::int64_t k = 1; k <= cfg.length; ++k) {
            x = apply_unchecked(p.params, x);
            S += cfg.schedule.at(k).contains(x) ? 1 : 0;
            if (cp < p.cps.size() && k == p.cps[cp])
                s_at[cp++] = S;
        }
    }
    *final_count = S;
    return s_at;
}

void write_trajectory_csv(const std::string& path, const std::vector<std::int64_t>& cps,
                          const std::vector<std::int64_t>& s_at, const std::vector<double>& e_at,
                          const std::vector<double>& ratio, const std::vector<double>& nd) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw std::runtime_error("cannot open " + path);
    std::fputs("n,S_n,E_n,ratio,normalized_deviation\n", f);
    for (std::size_t c = 0; c < cps.size(); ++c)
        std::fprintf(f, "%lld,%lld,%.17g,%.17g,%.17g\n", static_cast<long long>(cps[c]),
                     static_cast<long long>(s_at[c]), e_at[c], ratio[c], nd[c]);
    std::fclose(f);
}

ExperimentReport run_pipeline(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.trajectories < 1 || cfg.length < 1)
        throw std::invalid_argument("experiment: trajectories and length must be >= 1");

    const Pipeline p = prepare(cfg);

    ExperimentReport rep;
    rep.density_residual = p.residual;
    rep.power_iterations = p.density.iterations;
    rep.power_residual = p.density.final_residual;
    rep.checkpoints = p.cps;
    rep.expected = p.e_at;
    rep.residual_ok = p.residual <= cfg.residual_tol;
    rep.expected_half = p.e_half;
    rep.expected_full = p.e_full;

    const bool write_files = !cfg.out_dir.empty();
    if (write_files) {
        std::filesystem::create_directories(cfg.out_dir);
        write_density_csv(p.density, (std::filesystem::path(cfg.out_dir) / "density.csv").string());
    }

    const std::size_t C = p.cps.size();
    std::vector<std::vector<double>> ratio_cols(C), absdev_cols(C), absnd_cols(C);
    std::vector<double> final_ratios;
    std::int64_t zero_hits = 0;

    for (std::int64_t t = 0; t < cfg.trajectories; ++t) {
        std::int64_t final_count = 0;
        const std::vector<std::int64_t> s_at = simulate_counts(cfg, p, t, &final_count);

        TrajectorySummary sum;
        sum.index = t;
        sum.final_count = final_count;

        std::vector<double> ratio(C), nd(C);
        for (std::size_t c = 0; c < C; ++c) {
            const double E = p.e_at[c];
            const double S = static_cast<double>(s_at[c]);
            ratio[c] = E > 0.0 ? S / E : kNaN;
            nd[c] = std::isfinite(p.env_at[c]) && p.env_at[c] > 0.0 ? (S - E) / p.env_at[c] : kNaN;
            if (std::isfinite(ratio[c])) {
                ratio_cols[c].push_back(ratio[c]);
                absdev_cols[c].push_back(std::abs(ratio[c] - 1.0));
            }
            if (std::isfinite(nd[c]))
                absnd_cols[c].push_back(std::abs(nd[c]));
            if (E > kEE && std::isfinite(nd[c])) {
                sum.max_abs_normalized = std::max(sum.max_abs_normalized, std::abs(nd[c]));
                if (std::abs(nd[c]) > 1.0)
                    sum.envelope_dominated = false;
            }
        }
        // Tail maxima of |nd| over checkpoints >= c (entries past the e^e gate).
        std::vector<double> tail(C, 0.0);
        double running = 0.0;
        for (std::size_t c = C; c-- > 0;) {
            if (p.e_at[c] > kEE && std::isfinite(nd[c]))
                running = std::max(running, std::abs(nd[c]));
            tail[c] = running;
        }
        for (std::size_t c = 0; c + 1 < C; ++c)
            if (tail[c] < tail[c + 1]) {
                sum.tail_max_nonincreasing = false;
                break;
            }

        sum.final_ratio = ratio[C - 1];
        if (std::isfinite(sum.final_ratio))
            final_ratios.push_back(sum.final_ratio);
        if (final_count == 0)
            ++zero_hits;
        rep.trajectories.push_back(sum);

        if (write_files) {
            char name[64];
            std::snprintf(name, sizeof(name), "trajectory_%lld.csv", static_cast<long long>(t));
            write_trajectory_csv((std::filesystem::path(cfg.out_dir) / name).string(), p.cps, s_at,
                                 p.e_at, ratio, nd);
        }
    }

    for (std::size_t c = 0; c < C; ++c) {
        CheckpointAggregate agg;
        agg.n = p.cps[c];
        agg.expected = p.e_at[c];
        agg.median_ratio = quantile(ratio_cols[c], 0.5);
        agg.q25_ratio = quantile(ratio_cols[c], 0.25);
        agg.q75_ratio = quantile(ratio_cols[c], 0.75);
        agg.median_abs_ratio_err = quantile(absdev_cols[c], 0.5);
        agg.median_abs_normalized = quantile(absnd_cols[c], 0.5);
        agg.max_abs_normalized =
            absnd_cols[c].empty() ? kNaN
                                  : *std::max_element(absnd_cols[c].begin(), absnd_cols[c].end());
        rep.aggregates.push_back(agg);
    }

    std::int64_t dominated = 0, monotone = 0;
    for (const TrajectorySummary& s : rep.trajectories) {
        dominated += s.envelope_dominated ? 1 : 0;
        monotone += s.tail_max_nonincreasing ? 1 : 0;
    }
    const double T = static_cast<double>(cfg.trajectories);
    rep.envelope_dominated_fraction = static_cast<double>(dominated) / T;
    rep.tail_monotone_fraction = static_cast<double>(monotone) / T;

    // convergence flag: median |ratio - 1| nonincreasing over the last
    // checkpoints and small at the end
    {
        const std::size_t take = std::min<std::size_t>(3, C);
        bool ok = true;
        double last = kNaN;
        for (std::size_t c = C - take; c < C; ++c) {
            const double v = rep.aggregates[c].median_abs_ratio_err;
            if (std::isfinite(last) && v > last)
                ok = false;
            last = v;
        }
        rep.ratios_converging = ok && std::isfinite(last) && last <= 0.05;
    }

    rep.iqr_final_ratio = quantile(final_ratios, 0.75) - quantile(final_ratios, 0.25);
    rep.fraction_zero_hits = static_cast<double>(zero_hits) / T;

    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (write_files)
        write_report_json(rep, cfg, (std::filesystem::path(cfg.out_dir) / "report.json").string());
    return rep;
}

} // namespace

std::vector<std::int64_t> dyadic_checkpoints(std::int64_t n) {
    std::vector<std::int64_t> cps;
    for (std::int64_t c = 1024; c < n; c *= 2)
        cps.push_back(c);
    cps.push_back(n);
    return cps;
}

ExperimentReport run_sbc(const ExperimentConfig& config) {
    if (!config.schedule.satisfies_separation())
        throw std::invalid_argument(
            "run_sbc: schedule rejected, intervals must satisfy lo >= d > 0");
    return run_pipeline(config);
}

ExperimentReport run_counterexample(const ExperimentConfig& config) {
    if (config.schedule.kind != ScheduleKind::kim)
        throw std::invalid_argument("run_counterexample: kim schedule required");
    return run_pipeline(config);
}

PullbackDiagnostic run_pullback(const ExperimentConfig& config) {
    if (config.schedule.kind == ScheduleKind::kim)
        throw std::invalid_argument("run_pullback: fixed or listed schedule required");
    const MapParams params(config.alpha);
    Rng rng(derive_seed(config.seed, 2u));
    const double d = config.pullback_separation;
    if (!(d > 0.0 && d < 1.0))
        throw std::invalid_argument("run_pullback: separation must lie in (0,1)");

    PullbackDiagnostic diag;
    for (int b = 0; b < config.pullback_intervals; ++b) {
        const double lo = d + (1.0 - d) * rng.unit();
        const double hi = lo + (1.0 - lo) * rng.unit_oc();
        if (!(lo < hi && hi <= 1.0)) {
            --b;
            continue;
        }
        const Interval B{lo, hi};
        const PreimagePair pre = preimage_interval(params, B);
        for (std::int64_t t = 0; t < config.trajectories; ++t) {
            double xk = apply_unchecked(params, rng.unit_oc()); // x_1
            std::int64_t s_pre = 0;                             // S_n^1
            std::int64_t s_next = B.contains(xk) ? 1 : 0;       // S_{n+1}, seeded with k = 1
            for (std::int64_t k = 1; k <= config.length; ++k) {
                const bool pre_hit = pre.contains(xk);
                const double xk1 = apply_unchecked(params, xk);
                const bool b_hit = B.contains(xk1);
                if (pre_hit != b_hit)
                    ++diag.identity_violations;
                s_pre += pre_hit ? 1 : 0;
                s_next += b_hit ? 1 : 0;
                if (!(s_next - 1 <= s_pre && s_pre <= s_next))
                    ++diag.count_bound_violations;
                ++diag.steps_checked;
                xk = xk1;
            }
        }
    }
    return diag;
}

CorrelationStudyResult run_correlation_study(const ExperimentConfig& config,
                                             const std::vector<std::int64_t>& gaps) {
    if (config.schedule.kind != ScheduleKind::fixed)
        throw std::invalid_argument("run_correlation_study: fixed schedule required");
    const Interval B = config.schedule.fixed_interval;
    if (!(B.lo >= 0.5))
        throw std::invalid_argument("run_correlation_study: interval must lie in (1/2,1]");

    const MapParams params(config.alpha);
    const UlamDiscretization U =
        build_ulam(params, config.ulam_bins, config.grid, config.grid_floor);
    const DensityEstimate D = stationary_density(U, config.power_tol, config.power_max_iter);
    const double pb = measure_interval(D, B);

    const std::int64_t L = config.length;
    std::vector<HitSeries> ensemble(static_cast<std::size_t>(config.trajectories));
    for (std::int64_t t = 0; t < config.trajectories; ++t) {
        const double x0 = sample_mu(D, derive_seed(config.seed, 1000 + t), 1, config.sampling,
                                    params, config.burn_in_steps)[0];
        HitSeries bits(static_cast<std::size_t>(L));
        double x = x0;
        for (std::int64_t k = 1; k <= L; ++k) {
            x = apply_unchecked(params, x);
            bits[static_cast<std::size_t>(k - 1)] = B.contains(x) ? 1 : 0;
        }
        ensemble[static_cast<std::size_t>(t)] = std::move(bits);
    }

    const EventProbabilities probs(static_cast<std::size_t>(L), pb);
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (std::int64_t g : gaps)
        for (std::int64_t j = 1; j + g <= L; ++j)
            pairs.emplace_back(j, j + g);

    CorrelationStudyResult out;
    out.beta = 1.0 / config.alpha;
    out.mu_b = pb;
    out.diagnostic = pairwise_correlation_check(ensemble, probs,
                                                gouezel_certificate(config.alpha), pairs);

    // Implied certificate constants; estimated from the by-gap excesses,
    // reported rather than asserted.
    double c1 = 0.0;
    for (const GapExcess& ge : out.diagnostic.by_gap)
        if (ge.usable && ge.excess > 0.0)
            c1 = std::max(c1, ge.excess * std::pow(static_cast<double>(ge.gap), out.beta - 1.0));
    out.implied_c1 = c1;
    double bigc = 0.0;
    for (const GapExcess& ge : out.diagnostic.by_gap) {
        if (!ge.usable)
            continue;
        const double remainder =
            std::abs(ge.excess - c1 * std::pow(static_cast<double>(ge.gap), 1.0 - out.beta)) * pb *
            pb;
        bigc = std::max(bigc, remainder * std::pow(static_cast<double>(ge.gap), out.beta) / pb);
    }
    out.implied_big_c = bigc;
    out.inconclusive = !out.diagnostic.pairs.empty() &&
                       static_cast<std::size_t>(out.diagnostic.inconclusive) ==
                           out.diagnostic.pairs.size();
    return out;
}

void write_report_json(const ExperimentReport& report, const ExperimentConfig& config,
                       const std::string& path) {
    nlohmann::json j;

    nlohmann::json sched;
    switch (config.schedule.kind) {
    case ScheduleKind::fixed:
        sched["kind"] = "fixed";
        sched["interval"] = {config.schedule.fixed_interval.lo, config.schedule.fixed_interval.hi};
        break;
    case ScheduleKind::listed: {
        sched["kind"] = "listed";
        nlohmann::json arr = nlohmann::json::array();
        for (const Interval& b : config.schedule.listed)
            arr.push_back({b.lo, b.hi});
        sched["intervals"] = arr;
        break;
    }
    case ScheduleKind::kim:
        sched["kind"] = "kim";
        sched["exponent"] = config.schedule.kim_exponent;
        break;
    }
    sched["separation"] = config.schedule.separation;

    j["config"] = {
        {"alpha", config.alpha},
        {"schedule", sched},
        {"trajectories", config.trajectories},
        {"length", config.length},
        {"sampling", config.sampling == SamplingMode::inverse_cdf ? "inverse_cdf" : "burn_in"},
        {"seed", config.seed},
        {"ulam_bins", config.ulam_bins},
        {"grid", config.grid == GridKind::geometric ? "geometric" : "uniform"},
        {"grid_floor", config.grid_floor},
        {"gamma", config.envelope_gamma()},
        {"eps", config.eps},
        {"power_tol", config.power_tol},
        {"power_max_iter", config.power_max_iter},
        {"burn_in_steps", config.burn_in_steps},
        {"residual_probes", config.residual_probes},
        {"residual_tol", config.residual_tol},
    };

    j["density"] = {
        {"invariance_residual", report.density_residual},
        {"power_iterations", report.power_iterations},
        {"power_residual", report.power_residual},
    };

    j["checkpoints"] = report.checkpoints;
    j["expected"] = report.expected;

    nlohmann::json aggs = nlohmann::json::array();
    for (const CheckpointAggregate& a : report.aggregates)
        aggs.push_back({
            {"n", a.n},
            {"expected", a.expected},
            {"median_ratio", a.median_ratio},
            {"q25_ratio", a.q25_ratio},
            {"q75_ratio", a.q75_ratio},
            {"median_abs_ratio_err", a.median_abs_ratio_err},
            {"median_abs_normalized", a.median_abs_normalized},
            {"max_abs_normalized", a.max_abs_normalized},
        });
    j["aggregates"] = aggs;

    nlohmann::json trajs = nlohmann::json::array();
    for (const TrajectorySummary& s : report.trajectories)
        trajs.push_back({
            {"index", s.index},
            {"final_count", s.final_count},
            {"final_ratio", s.final_ratio},
            {"max_abs_normalized", s.max_abs_normalized},
            {"envelope_dominated", s.envelope_dominated},
            {"tail_max_nonincreasing", s.tail_max_nonincreasing},
        });
    j["trajectories"] = trajs;

    j["verdicts"] = {
        {"residual_ok", report.residual_ok},
        {"ratios_converging", report.ratios_converging},
        {"envelope_dominated_fraction", report.envelope_dominated_fraction},
        {"tail_monotone_fraction", report.tail_monotone_fraction},
    };

    if (config.schedule.kind == ScheduleKind::kim)
        j["counterexample"] = {
            {"iqr_final_ratio", report.iqr_final_ratio},
            {"fraction_zero_hits", report.fraction_zero_hits},
            {"expected_half", report.expected_half},
            {"expected_full", report.expected_full},
            {"expected_growing", report.expected_full > report.expected_half},
        };

    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw std::runtime_error("write_report_json: cannot open " + path);
    const std::string text = j.dump(2);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fputc('\n', f);
    std::fclose(f);
}

} // namespace bclab
