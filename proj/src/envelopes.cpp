#include "bclab/envelopes.hpp"

#include <cmath>
#include <limits>

namespace bclab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double envelope_theorem1_at(double E, const GrowthFunction& g, const WeightFunction& psi) {
    if (!(E > 1.0))
        return kNaN;
    const double logE = std::log(E);
    return std::sqrt(g(E) * psi(logE)) * std::pow(logE, 1.5);
}

std::vector<double> envelope_theorem1(const std::vector<double>& E, const GrowthFunction& g,
                                      const WeightFunction& psi) {
    std::vector<double> out(E.size());
    for (std::size_t k = 0; k < E.size(); ++k)
        out[k] = envelope_theorem1_at(E[k], g, psi);
    return out;
}

double envelope_corollary1_at(double E, double gamma, double eps) {
    // log log E must be positive, so entries with E <= e are marked absent.
    if (!(E > 2.718281828459045235))
        return kNaN;
    const double logE = std::log(E);
    return std::pow(E, 0.5 * (1.0 + gamma)) * std::pow(logE, 1.5) *
           std::pow(std::log(logE), 0.5 * (1.0 + eps));
}

std::vector<double> envelope_corollary1(const std::vector<double>& E, double gamma, double eps) {
    std::vector<double> out(E.size());
    for (std::size_t k = 0; k < E.size(); ++k)
        out[k] = envelope_corollary1_at(E[k], gamma, eps);
    return out;
}

} // namespace bclab
