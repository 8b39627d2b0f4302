#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bclab/interval.hpp"
#include "bclab/map.hpp"

namespace bclab {

enum class GridKind { uniform, geometric };

// Sparse row-stochastic transition matrix on a bin grid,
//   entry (i,j) = lambda(I_i cap T^{-1} I_j) / lambda(I_i),
// stored column-compressed (the stationary solve walks columns).
// Preimage edges are computed once per grid edge and shared between
// adjacent columns, so each row sums to 1 up to rounding.
struct UlamDiscretization {
    std::vector<double> edges; // m+1 edges, edges[0] = 0, edges[m] = 1
    std::vector<std::size_t> col_ptr;
    std::vector<std::uint32_t> row_idx;
    std::vector<double> value;
    GridKind grid = GridKind::geometric;
    double grid_floor = 0.0;

    std::size_t bin_count() const { return edges.size() - 1; }
    double bin_width(std::size_t i) const { return edges[i + 1] - edges[i]; }
    std::vector<double> row_sums() const;
    std::size_t max_column_nonzeros() const;
};

// Analytic build: the preimage of each bin is two intervals, one per branch;
// entries are overlap lengths, no sampling. The geometric grid clusters
// edges near 0 (smallest positive edge = grid_floor) where the invariant
// density blows up.
UlamDiscretization build_ulam(const MapParams& params, std::size_t m, GridKind grid,
                              double grid_floor = 1e-5);

struct ConvergenceError : std::runtime_error {
    double last_residual;
    std::int64_t iterations;
    ConvergenceError(const std::string& what, double resid, std::int64_t iters)
        : std::runtime_error(what), last_residual(resid), iterations(iters) {}
};

// Piecewise-constant density on the bin grid, normalized to unit mass;
// cdf[i] = mu((0, edges[i]]) with cdf[m] == 1 exactly.
struct DensityEstimate {
    std::vector<double> edges;
    std::vector<double> density;
    std::vector<double> cdf;
    std::int64_t iterations = 0;
    double final_residual = 0.0;

    std::size_t bin_count() const { return density.size(); }
    double mass_upto(double x) const;
};

// Power iteration on the measure-transport action from the uniform density;
// stops when successive iterates differ by <= tol in l1. Throws
// ConvergenceError with the last residual after max_iter.
DensityEstimate stationary_density(const UlamDiscretization& U, double tol = 1e-10,
                                   std::int64_t max_iter = 100000);

// Integral of the density over b, with exact partial-bin proration.
double measure_interval(const DensityEstimate& D, const Interval& b);

// max over random probe intervals b of |mu(T^{-1} b) - mu(b)|.
double invariance_residual(const DensityEstimate& D, const MapParams& params, int probes,
                           std::uint64_t seed = 2025);

enum class SamplingMode { inverse_cdf, burn_in };

// inverse_cdf inverts the piecewise-linear CDF exactly; burn_in starts from
// Lebesgue-uniform points and discards burn_in_steps iterates.
std::vector<double> sample_mu(const DensityEstimate& D, std::uint64_t seed, std::size_t n,
                              SamplingMode mode, const MapParams& params,
                              int burn_in_steps = 1000);

// CSV with columns bin_lo, bin_hi, density.
void write_density_csv(const DensityEstimate& D, const std::string& path);

} // namespace bclab
