#include "bclab/growth.hpp"

#include <cmath>
#include <stdexcept>

namespace bclab {

namespace {

// log-spaced validation grid over [1, 1e12], 20 points per decade
std::vector<double> validation_grid() {
    std::vector<double> g;
    g.reserve(241);
    for (int k = 0; k <= 240; ++k)
        g.push_back(std::pow(10.0, static_cast<double>(k) / 20.0));
    return g;
}

constexpr double kSlack = 1e-9; // relative slack for float noise in monotone checks

} // namespace

CorrelationCertificate gouezel_certificate(double alpha, double C1, double C) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("gouezel_certificate: alpha must lie in (0,1)");
    const double beta = 1.0 / alpha;
    CorrelationCertificate cert;
    cert.c = [C1, beta](double x) { return C1 * std::pow(x, 1.0 - beta); };
    cert.b = [C, beta](double n) { return C * std::pow(n, -beta); };
    cert.C = C;
    return cert;
}

GrowthDiagnostic validate_growth(const GrowthFunction& g) {
    GrowthDiagnostic diag;
    diag.ratio_to_x.condition = "g(x)/x nondecreasing";
    diag.complement.condition = "x^(2-delta)/g(x) nondecreasing";
    const std::vector<double> xs = validation_grid();
    double prev1 = -1.0, prev2 = -1.0;
    for (double x : xs) {
        const double gx = g(x);
        const double r1 = gx / x;
        const double r2 = std::pow(x, 2.0 - g.delta) / gx;
        if (diag.ratio_to_x.pass && prev1 > 0.0 && r1 < prev1 * (1.0 - kSlack)) {
            diag.ratio_to_x.pass = false;
            diag.ratio_to_x.first_violation_x = x;
        }
        if (diag.complement.pass && prev2 > 0.0 && r2 < prev2 * (1.0 - kSlack)) {
            diag.complement.pass = false;
            diag.complement.first_violation_x = x;
        }
        prev1 = r1;
        prev2 = r2;
    }
    return diag;
}

PsiDiagnostic validate_psi(const WeightFunction& psi, std::int64_t horizon) {
    if (horizon < 8)
        throw std::invalid_argument("validate_psi: horizon too small");
    PsiDiagnostic diag;
    double sum = 0.0;
    std::int64_t next = 1;
    for (std::int64_t n = 1; n <= horizon; ++n) {
        sum += 1.0 / (static_cast<double>(n) * psi(static_cast<double>(n)));
        if (n == next) {
            diag.checkpoints.push_back(n);
            diag.partial_sums.push_back(sum);
            next *= 2;
        }
    }
    for (std::size_t k = 1; k < diag.partial_sums.size(); ++k)
        diag.block_increments.push_back(diag.partial_sums[k] - diag.partial_sums[k - 1]);
    if (!diag.block_increments.empty())
        diag.last_increment = diag.block_increments.back();

    // Heuristic gate: successive block-increment ratios near 1 mean the
    // partial sums are not Cauchy at this horizon. Calibrated so that
    // psi = 1 is flagged while psi = x^0.1 and psi = log^2 pass.
    const std::size_t nb = diag.block_increments.size();
    if (nb >= 2) {
        std::size_t count = 0;
        double acc = 0.0;
        const std::size_t start = nb > 3 ? nb - 3 : 1;
        for (std::size_t k = start; k < nb; ++k) {
            if (diag.block_increments[k - 1] > 0.0) {
                acc += diag.block_increments[k] / diag.block_increments[k - 1];
                ++count;
            }
        }
        diag.tail_ratio = count > 0 ? acc / static_cast<double>(count) : 0.0;
        diag.suspect_divergent = diag.tail_ratio > 0.98;
    }
    return diag;
}

GrowthFunction g_from_c(const CorrelationCertificate& cert, double delta) {
    const std::vector<double> xs = validation_grid();
    double prev_c = -1.0, prev_f = -1.0;
    for (double x : xs) {
        const double cx = cert.c(x);
        if (!(cx > 0.0))
            throw std::invalid_argument("g_from_c: certificate rejected, c not positive");
        if (prev_c > 0.0 && cx > prev_c * (1.0 + 1e-12))
            throw std::invalid_argument("g_from_c: certificate rejected, c increasing");
        const double fx = x / cx;
        if (prev_f > 0.0 && !(fx > prev_f))
            throw std::invalid_argument(
                "g_from_c: certificate rejected, f(x) = x/c(x) not strictly increasing");
        prev_c = cx;
        prev_f = fx;
    }
    if (!(cert.c(xs.back()) < cert.c(xs.front())))
        throw std::invalid_argument("g_from_c: certificate rejected, c does not decay");

    auto c = cert.c;
    GrowthFunction out;
    out.delta = delta;
    out.g = [c](double x) {
        if (!(x > 0.0))
            return 0.0;
        auto f = [&c](double t) { return t / c(t); };
        double hi = 1.0;
        int guard = 0;
        while (f(hi) < x && guard++ < 1200)
            hi *= 2.0;
        double lo = hi > 1.0 ? 0.5 * hi : 0.0;
        for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (f(mid) < x)
                lo = mid;
            else
                hi = mid;
        }
        return x * 0.5 * (lo + hi);
    };
    return out;
}

LogLogFit fit_loglog_decay(const std::vector<double>& x, const std::vector<double>& y) {
    LogLogFit fit;
    if (x.size() != y.size() || x.size() < 3)
        return fit;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || y[k] == 0.0 || !std::isfinite(y[k]))
            continue;
        const double lx = std::log(x[k]);
        const double ly = std::log(std::abs(y[k]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 3)
        return fit;
    const double det = static_cast<double>(n) * sxx - sx * sx;
    if (det == 0.0)
        return fit;
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / static_cast<double>(n);
    fit.valid = true;
    fit.exponent = -slope;
    fit.amplitude = std::exp(intercept);
    return fit;
}

} // namespace bclab
