#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bclab {

// Variance-bound function g; admissible when g(x)/x and x^{2-delta}/g(x)
// are both nondecreasing for the stored delta in (0,1).
struct GrowthFunction {
    std::function<double(double)> g;
    double delta = 0.5;

    double operator()(double x) const { return g(x); }
};

// Positive nondecreasing weight psi with sum 1/(n psi(n)) finite.
struct WeightFunction {
    std::function<double(double)> psi;

    double operator()(double x) const { return psi(x); }
};

// Pairwise dependence budget for u < v:
//   P(A_u A_v) <= (1 + c(v-u)) P(A_u) P(A_v) + b(v-u) P(A_u).
struct CorrelationCertificate {
    std::function<double(double)> c; // positive, non-increasing, -> 0
    std::function<double(double)> b; // nonnegative, summable over integer gaps
    double C = 1.0;                  // constant multiplier carried by the certificate
};

// c(x) = C1 x^{1-beta}, b_n = C n^{-beta} with beta = 1/alpha.
CorrelationCertificate gouezel_certificate(double alpha, double C1 = 1.0, double C = 1.0);

struct MonotonicityReport {
    bool pass = true;
    double first_violation_x = 0.0;
    std::string condition;
};

struct GrowthDiagnostic {
    MonotonicityReport ratio_to_x;      // g(x)/x nondecreasing
    MonotonicityReport complement;      // x^{2-delta}/g(x) nondecreasing
    bool pass() const { return ratio_to_x.pass && complement.pass; }
};

// Checks both monotonicity conditions on a log-spaced grid over [1, 1e12].
GrowthDiagnostic validate_growth(const GrowthFunction& g);

struct PsiDiagnostic {
    std::vector<std::int64_t> checkpoints;  // dyadic n
    std::vector<double> partial_sums;       // sum_{k<=n} 1/(k psi(k))
    std::vector<double> block_increments;
    double last_increment = 0.0;
    double tail_ratio = 0.0; // mean successive-increment ratio over the last blocks
    bool suspect_divergent = false;
};

// Heuristic summability gate for sum 1/(n psi(n)): dyadic partial sums up to
// horizon; flagged "suspect divergent" when block increments do not decay.
PsiDiagnostic validate_psi(const WeightFunction& psi, std::int64_t horizon);

// g(x) = x * f^{-1}(x) with f(x) = x / c(x); f^{-1} found by monotone
// bracketing plus bisection to relative tolerance 1e-10. Throws
// std::invalid_argument when the certificate fails validation (c not
// positive non-increasing and decaying, or f not strictly increasing).
GrowthFunction g_from_c(const CorrelationCertificate& cert, double delta = 0.5);

// Least-squares slope of log|y| against log(x); exposed for the decay-rate
// fits so the regression itself is testable on planted power laws.
struct LogLogFit {
    bool valid = false;
    double exponent = 0.0;  // y ~ amplitude * x^{-exponent}
    double amplitude = 0.0;
};
LogLogFit fit_loglog_decay(const std::vector<double>& x, const std::vector<double>& y);

} // namespace bclab
