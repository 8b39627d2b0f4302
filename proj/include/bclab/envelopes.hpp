#pragma once

#include <vector>

#include "bclab/growth.hpp"

namespace bclab {

// sqrt(g(E) psi(log E)) * (log E)^{3/2}; NaN marks entries with E <= 1.
double envelope_theorem1_at(double E, const GrowthFunction& g, const WeightFunction& psi);
std::vector<double> envelope_theorem1(const std::vector<double>& E, const GrowthFunction& g,
                                      const WeightFunction& psi);

// E^{(1+gamma)/2} (log E)^{3/2} (log log E)^{(1+eps)/2}; NaN for E <= e.
double envelope_corollary1_at(double E, double gamma, double eps);
std::vector<double> envelope_corollary1(const std::vector<double>& E, double gamma, double eps);

} // namespace bclab
