// bclab: simulation and verification lab for hit-counting statistics of the
// intermittent interval map T_alpha against interval schedules.
//
// Subcommands: density, sbc, counterexample, pullback, correlations, validate.
// Exit codes: 0 success, 1 verdict failure, 2 usage or config error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bclab/envelopes.hpp"
#include "bclab/experiment.hpp"
#include "bclab/growth.hpp"
#include "bclab/rng.hpp"
#include "bclab/ulam.hpp"

namespace {

using nlohmann::json;

bclab::Interval parse_interval(const std::string& text) {
    const auto pos = text.find(':');
    if (pos == std::string::npos)
        throw CLI::ValidationError("interval", "expected lo:hi, got '" + text + "'");
    return bclab::make_interval(std::stod(text.substr(0, pos)), std::stod(text.substr(pos + 1)));
}

std::vector<bclab::Interval> parse_interval_list(const std::string& text) {
    std::vector<bclab::Interval> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos)
            end = text.size();
        out.push_back(parse_interval(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(sep, start);
        if (end == std::string::npos)
            end = text.size();
        parts.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

// growth specs: "pow:P" or "gouezel:ALPHA[:C1]"
bclab::GrowthFunction parse_growth(const std::string& text, double delta) {
    const auto parts = split(text, ':');
    if (parts[0] == "pow" && parts.size() == 2) {
        const double p = std::stod(parts[1]);
        bclab::GrowthFunction g;
        g.delta = delta;
        g.g = [p](double x) { return std::pow(x, p); };
        return g;
    }
    if (parts[0] == "gouezel" && (parts.size() == 2 || parts.size() == 3)) {
        const double alpha = std::stod(parts[1]);
        const double c1 = parts.size() == 3 ? std::stod(parts[2]) : 1.0;
        return bclab::g_from_c(bclab::gouezel_certificate(alpha, c1), delta);
    }
    throw CLI::ValidationError("growth", "expected pow:P or gouezel:ALPHA[:C1], got '" + text + "'");
}

// weight specs: "const:C", "pow:P", "log:EPS" meaning (log(e+x))^{1+EPS}
bclab::WeightFunction parse_weight(const std::string& text) {
    const auto parts = split(text, ':');
    bclab::WeightFunction w;
    if (parts[0] == "const" && parts.size() == 2) {
        const double c = std::stod(parts[1]);
        w.psi = [c](double) { return c; };
        return w;
    }
    if (parts[0] == "pow" && parts.size() == 2) {
        const double p = std::stod(parts[1]);
        w.psi = [p](double x) { return std::pow(x, p); };
        return w;
    }
    if (parts[0] == "log" && parts.size() == 2) {
        const double eps = std::stod(parts[1]);
        w.psi = [eps](double x) {
            return std::pow(std::log(std::exp(1.0) + x), 1.0 + eps);
        };
        return w;
    }
    throw CLI::ValidationError("weight", "expected const:C, pow:P or log:EPS, got '" + text + "'");
}

// certificate specs: "pow:A[:C1]" for c(x) = C1 x^{-A}
bclab::CorrelationCertificate parse_certificate(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts[0] == "pow" && (parts.size() == 2 || parts.size() == 3)) {
        const double a = std::stod(parts[1]);
        const double c1 = parts.size() == 3 ? std::stod(parts[2]) : 1.0;
        bclab::CorrelationCertificate cert;
        cert.c = [a, c1](double x) { return c1 * std::pow(x, -a); };
        cert.b = [](double) { return 0.0; };
        return cert;
    }
    throw CLI::ValidationError("certificate", "expected pow:A[:C1], got '" + text + "'");
}

struct CommonFlags {
    std::string interval = "0.5:1.0";
    std::string intervals;
    double separation = -1.0; // default: min lo of the schedule
    std::string sampling = "inverse_cdf";
    std::string grid = "geometric";
};

void add_experiment_flags(CLI::App* cmd, bclab::ExperimentConfig& cfg, CommonFlags& flags,
                          bool with_interval) {
    cmd->set_config("--config", "", "flat key=value config file; flags override");
    cmd->add_option("--alpha", cfg.alpha, "map exponent in (0,1)");
    if (with_interval) {
        cmd->add_option("--interval", flags.interval, "fixed target interval lo:hi");
        cmd->add_option("--intervals", flags.intervals, "listed schedule lo:hi,lo:hi,...");
        cmd->add_option("--d", flags.separation, "left-endpoint separation d");
    }
    cmd->add_option("--trajectories", cfg.trajectories, "ensemble size");
    cmd->add_option("--length", cfg.length, "orbit length N");
    cmd->add_option("--sampling", flags.sampling, "inverse_cdf or burn_in");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--bins", cfg.ulam_bins, "Ulam bin count");
    cmd->add_option("--grid", flags.grid, "geometric or uniform");
    cmd->add_option("--grid-floor", cfg.grid_floor, "smallest positive geometric edge");
    cmd->add_option("--gamma", cfg.gamma, "envelope exponent (default: alpha)");
    cmd->add_option("--eps", cfg.eps, "envelope epsilon");
    cmd->add_option("--tol", cfg.power_tol, "power-iteration l1 tolerance");
    cmd->add_option("--max-iter", cfg.power_max_iter, "power-iteration cap");
    cmd->add_option("--burn-in", cfg.burn_in_steps, "burn-in steps for burn_in sampling");
    cmd->add_option("--probes", cfg.residual_probes, "invariance-residual probe count");
    cmd->add_option("--residual-tol", cfg.residual_tol, "invariance-residual gate");
    cmd->add_option("--out", cfg.out_dir, "output directory");
}

void finalize_config(bclab::ExperimentConfig& cfg, CommonFlags& flags, bool kim) {
    cfg.sampling = flags.sampling == "burn_in" ? bclab::SamplingMode::burn_in
                                               : bclab::SamplingMode::inverse_cdf;
    cfg.grid = flags.grid == "uniform" ? bclab::GridKind::uniform : bclab::GridKind::geometric;
    if (kim) {
        cfg.schedule = bclab::kim_schedule(cfg.alpha);
        return;
    }
    if (!flags.intervals.empty()) {
        auto list = parse_interval_list(flags.intervals);
        double d = flags.separation;
        if (d < 0.0) {
            d = 1.0;
            for (const auto& b : list)
                d = std::min(d, b.lo);
        }
        cfg.schedule = bclab::listed_schedule(std::move(list), d);
    } else {
        const bclab::Interval b = parse_interval(flags.interval);
        const double d = flags.separation < 0.0 ? b.lo : flags.separation;
        cfg.schedule = bclab::fixed_schedule(b, d);
    }
}

void print_json(const json& j) { std::printf("%s\n", j.dump(2).c_str()); }

int cmd_density(const bclab::ExperimentConfig& cfg) {
    const bclab::MapParams params(cfg.alpha);
    const auto U = bclab::build_ulam(params, cfg.ulam_bins, cfg.grid, cfg.grid_floor);
    const auto D = bclab::stationary_density(U, cfg.power_tol, cfg.power_max_iter);
    const double resid =
        bclab::invariance_residual(D, params, cfg.residual_probes, bclab::derive_seed(cfg.seed, 1u));

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        bclab::write_density_csv(D, (std::filesystem::path(cfg.out_dir) / "density.csv").string());
    }
    json j = {
        {"alpha", cfg.alpha},
        {"bins", cfg.ulam_bins},
        {"grid", cfg.grid == bclab::GridKind::geometric ? "geometric" : "uniform"},
        {"power_iterations", D.iterations},
        {"power_residual", D.final_residual},
        {"invariance_residual", resid},
        {"residual_ok", resid <= cfg.residual_tol},
        {"mass_above_half", bclab::measure_interval(D, bclab::Interval{0.5, 1.0})},
    };
    print_json(j);
    return resid <= cfg.residual_tol ? 0 : 1;
}

int cmd_run(const bclab::ExperimentConfig& cfg, bool counterexample) {
    const bclab::ExperimentReport rep =
        counterexample ? bclab::run_counterexample(cfg) : bclab::run_sbc(cfg);
    json j = {
        {"invariance_residual", rep.density_residual},
        {"residual_ok", rep.residual_ok},
        {"ratios_converging", rep.ratios_converging},
        {"final_median_ratio", rep.aggregates.back().median_ratio},
        {"final_median_abs_ratio_err", rep.aggregates.back().median_abs_ratio_err},
        {"envelope_dominated_fraction", rep.envelope_dominated_fraction},
        {"wall_seconds", rep.wall_seconds},
    };
    if (counterexample) {
        j["iqr_final_ratio"] = rep.iqr_final_ratio;
        j["fraction_zero_hits"] = rep.fraction_zero_hits;
        j["expected_growing"] = rep.expected_full > rep.expected_half;
        if (!rep.ratios_converging)
            j["note"] = "ratios S_n/E_n did not converge to 1 (expected for this schedule)";
    }
    print_json(j);
    return rep.residual_ok ? 0 : 1;
}

int cmd_pullback(const bclab::ExperimentConfig& cfg) {
    const bclab::PullbackDiagnostic diag = bclab::run_pullback(cfg);
    json j = {
        {"steps_checked", diag.steps_checked},
        {"identity_violations", diag.identity_violations},
        {"count_bound_violations", diag.count_bound_violations},
        {"pass", diag.pass()},
    };
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::FILE* f = std::fopen(
            (std::filesystem::path(cfg.out_dir) / "pullback.json").string().c_str(), "w");
        if (f) {
            const std::string text = j.dump(2);
            std::fwrite(text.data(), 1, text.size(), f);
            std::fputc('\n', f);
            std::fclose(f);
        }
    }
    print_json(j);
    return diag.pass() ? 0 : 1;
}

int cmd_correlations(const bclab::ExperimentConfig& cfg, std::int64_t max_gap) {
    std::vector<std::int64_t> gaps;
    for (std::int64_t g = 1; g <= max_gap; ++g)
        gaps.push_back(g);
    const bclab::CorrelationStudyResult res = bclab::run_correlation_study(cfg, gaps);
    json by_gap = json::array();
    for (const auto& ge : res.diagnostic.by_gap)
        by_gap.push_back({{"gap", ge.gap},
                          {"excess", ge.excess},
                          {"se", ge.se},
                          {"usable", ge.usable}});
    json j = {
        {"beta", res.beta},
        {"mu_b", res.mu_b},
        {"pairs", res.diagnostic.pairs.size()},
        {"pass_fraction", res.diagnostic.pass_fraction},
        {"violations", res.diagnostic.violations},
        {"inconclusive", res.inconclusive},
        {"fit_valid", res.diagnostic.decay.valid},
        {"decay_exponent", res.diagnostic.decay.exponent},
        {"implied_c1", res.implied_c1},
        {"implied_big_c", res.implied_big_c},
        {"by_gap", by_gap},
    };
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::FILE* f = std::fopen(
            (std::filesystem::path(cfg.out_dir) / "correlations.json").string().c_str(), "w");
        if (f) {
            const std::string text = j.dump(2);
            std::fwrite(text.data(), 1, text.size(), f);
            std::fputc('\n', f);
            std::fclose(f);
        }
    }
    print_json(j);
    return 0;
}

int cmd_validate(const std::string& g_spec, double delta, const std::string& psi_spec,
                 std::int64_t horizon, const std::string& c_spec) {
    bool all_pass = true;
    json j;
    if (!g_spec.empty()) {
        const bclab::GrowthFunction g = parse_growth(g_spec, delta);
        const bclab::GrowthDiagnostic diag = bclab::validate_growth(g);
        j["growth"] = {
            {"spec", g_spec},
            {"delta", delta},
            {"pass", diag.pass()},
            {"ratio_to_x_ok", diag.ratio_to_x.pass},
            {"complement_ok", diag.complement.pass},
        };
        if (!diag.ratio_to_x.pass)
            j["growth"]["first_violation_x"] = diag.ratio_to_x.first_violation_x;
        else if (!diag.complement.pass)
            j["growth"]["first_violation_x"] = diag.complement.first_violation_x;
        all_pass = all_pass && diag.pass();
    }
    if (!psi_spec.empty()) {
        const bclab::WeightFunction w = parse_weight(psi_spec);
        const bclab::PsiDiagnostic diag = bclab::validate_psi(w, horizon);
        j["psi"] = {
            {"spec", psi_spec},
            {"horizon", horizon},
            {"last_increment", diag.last_increment},
            {"tail_ratio", diag.tail_ratio},
            {"suspect_divergent", diag.suspect_divergent},
        };
        all_pass = all_pass && !diag.suspect_divergent;
    }
    if (!c_spec.empty()) {
        try {
            const bclab::GrowthFunction g = bclab::g_from_c(parse_certificate(c_spec), delta);
            j["certificate"] = {
                {"spec", c_spec},
                {"accepted", true},
                {"g_at_10", g(10.0)},
                {"g_at_1e6", g(1e6)},
            };
        } catch (const std::invalid_argument& e) {
            j["certificate"] = {{"spec", c_spec}, {"accepted", false}, {"reason", e.what()}};
            all_pass = false;
        }
    }
    print_json(j);
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation lab for hit statistics of intermittent interval maps"};
    app.require_subcommand(1);

    bclab::ExperimentConfig cfg;
    CommonFlags flags;

    CLI::App* density = app.add_subcommand("density", "invariant density via Ulam discretization");
    add_experiment_flags(density, cfg, flags, false);

    CLI::App* sbc = app.add_subcommand("sbc", "hit-count convergence S_n/E_n for separated schedules");
    add_experiment_flags(sbc, cfg, flags, true);

    CLI::App* counter =
        app.add_subcommand("counterexample", "kim schedule run: S_n/E_n fails to settle");
    add_experiment_flags(counter, cfg, flags, false);

    CLI::App* pullback = app.add_subcommand("pullback", "exact preimage indicator identity check");
    add_experiment_flags(pullback, cfg, flags, false);
    pullback->add_option("--num-intervals", cfg.pullback_intervals, "random intervals to test");
    pullback->add_option("--separation", cfg.pullback_separation, "left-endpoint separation d");

    std::int64_t max_gap = 64;
    CLI::App* correlations =
        app.add_subcommand("correlations", "pairwise correlation decay study");
    add_experiment_flags(correlations, cfg, flags, true);
    correlations->add_option("--max-gap", max_gap, "largest index gap");

    std::string g_spec, psi_spec, c_spec;
    double delta = 0.5;
    std::int64_t horizon = 1 << 20;
    CLI::App* validate = app.add_subcommand("validate", "growth/weight/certificate validation");
    validate->add_option("--g", g_spec, "growth spec: pow:P or gouezel:ALPHA[:C1]");
    validate->add_option("--delta", delta, "delta for the growth conditions");
    validate->add_option("--psi", psi_spec, "weight spec: const:C, pow:P or log:EPS");
    validate->add_option("--horizon", horizon, "summability horizon");
    validate->add_option("--c", c_spec, "certificate spec: pow:A[:C1]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        // defaults that depend on the subcommand
        if (counter->parsed() && !sbc->parsed()) {
            if (counter->count("--alpha") == 0)
                cfg.alpha = 0.75;
        }
        if (correlations->parsed()) {
            if (correlations->count("--interval") == 0)
                flags.interval = "0.5:0.75";
            if (correlations->count("--trajectories") == 0)
                cfg.trajectories = 100000;
            if (correlations->count("--length") == 0)
                cfg.length = 128;
        }
        if (pullback->parsed()) {
            if (pullback->count("--trajectories") == 0)
                cfg.trajectories = 10;
            if (pullback->count("--length") == 0)
                cfg.length = 1000;
        }

        if (density->parsed()) {
            finalize_config(cfg, flags, false);
            return cmd_density(cfg);
        }
        if (sbc->parsed()) {
            finalize_config(cfg, flags, false);
            return cmd_run(cfg, false);
        }
        if (counter->parsed()) {
            finalize_config(cfg, flags, true);
            return cmd_run(cfg, true);
        }
        if (pullback->parsed()) {
            finalize_config(cfg, flags, false);
            return cmd_pullback(cfg);
        }
        if (correlations->parsed()) {
            finalize_config(cfg, flags, false);
            return cmd_correlations(cfg, max_gap);
        }
        if (validate->parsed())
            return cmd_validate(g_spec, delta, psi_spec, horizon, c_spec);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
