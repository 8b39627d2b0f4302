#include "bclab/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "bclab/rng.hpp"

namespace bclab {

namespace {

std::vector<double> make_edges(std::size_t m, GridKind grid, double grid_floor) {
    std::vector<double> edges(m + 1);
    edges[0] = 0.0;
    if (grid == GridKind::uniform) {
        for (std::size_t i = 1; i < m; ++i)
            edges[i] = static_cast<double>(i) / static_cast<double>(m);
    } else {
        if (!(grid_floor > 0.0 && grid_floor < 1.0))
            throw std::invalid_argument("build_ulam: grid_floor must lie in (0,1)");
        for (std::size_t i = 1; i < m; ++i)
            edges[i] = std::pow(grid_floor,
                                static_cast<double>(m - i) / static_cast<double>(m - 1));
    }
    edges[m] = 1.0;
    return edges;
}

} // namespace

std::vector<double> UlamDiscretization::row_sums() const {
    std::vector<double> sums(bin_count(), 0.0);
    for (std::size_t j = 0; j < bin_count(); ++j)
        for (std::size_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k)
            sums[row_idx[k]] += value[k];
    return sums;
}

std::size_t UlamDiscretization::max_column_nonzeros() const {
    std::size_t best = 0;
    for (std::size_t j = 0; j < bin_count(); ++j)
        best = std::max(best, col_ptr[j + 1] - col_ptr[j]);
    return best;
}

UlamDiscretization build_ulam(const MapParams& params, std::size_t m, GridKind grid,
                              double grid_floor) {
    if (m < 2)
        throw std::invalid_argument("build_ulam: need at least 2 bins");

    UlamDiscretization U;
    U.grid = grid;
    U.grid_floor = grid == GridKind::geometric ? grid_floor : 0.0;
    U.edges = make_edges(m, grid, grid_floor);
    const std::vector<double>& edges = U.edges;

    // Preimages of every grid edge, one per branch. Shared endpoints make the
    // preimage intervals tile (0,1] exactly, which keeps rows stochastic.
    std::vector<double> lpre(m + 1), rpre(m + 1);
    lpre[0] = 0.0;
    for (std::size_t i = 1; i <= m; ++i)
        lpre[i] = invert_left(params, edges[i]);
    lpre[m] = 0.5; // invert_left(1) up to root-finder tolerance; snapped
    for (std::size_t i = 0; i <= m; ++i)
        rpre[i] = 0.5 * (edges[i] + 1.0);

    std::vector<double> inv_width(m);
    for (std::size_t i = 0; i < m; ++i)
        inv_width[i] = 1.0 / (edges[i + 1] - edges[i]);

    U.col_ptr.assign(m + 1, 0);
    std::vector<std::pair<std::uint32_t, double>> col;
    for (std::size_t j = 0; j < m; ++j) {
        col.clear();
        auto add_interval = [&](double u, double v) {
            if (!(v > u))
                return;
            std::size_t i =
                static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), u) -
                                         edges.begin());
            if (i == 0)
                i = 1;
            for (std::size_t bin = i - 1; bin < m && edges[bin] < v; ++bin) {
                const double ov = std::min(v, edges[bin + 1]) - std::max(u, edges[bin]);
                if (ov > 0.0)
                    col.emplace_back(static_cast<std::uint32_t>(bin), ov * inv_width[bin]);
            }
        };
        add_interval(lpre[j], lpre[j + 1]);
        add_interval(rpre[j], rpre[j + 1]);
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < col.size(); ++k) {
            if (!U.row_idx.empty() && U.row_idx.size() > U.col_ptr[j] &&
                U.row_idx.back() == col[k].first) {
                U.value.back() += col[k].second;
            } else {
                U.row_idx.push_back(col[k].first);
                U.value.push_back(col[k].second);
            }
        }
        U.col_ptr[j + 1] = U.row_idx.size();
    }
    return U;
}

double DensityEstimate::mass_upto(double x) const {
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return cdf.back();
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), x) -
                                 edges.begin()) - 1;
    return cdf[i] + density[i] * (x - edges[i]);
}

DensityEstimate stationary_density(const UlamDiscretization& U, double tol,
                                   std::int64_t max_iter) {
    if (!(tol > 0.0))
        throw std::invalid_argument("stationary_density: tol must be positive");
    const std::size_t m = U.bin_count();
    std::vector<double> w(m), w2(m);
    for (std::size_t i = 0; i < m; ++i)
        w[i] = U.bin_width(i); // uniform density, unit mass

    double resid = std::numeric_limits<double>::infinity();
    std::int64_t it = 0;
    while (it < max_iter) {
        ++it;
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t k = U.col_ptr[j]; k < U.col_ptr[j + 1]; ++k)
                acc += U.value[k] * w[U.row_idx[k]];
            w2[j] = acc;
        }
        resid = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            resid += std::abs(w2[i] - w[i]);
        w.swap(w2);
        if (resid <= tol)
            break;
    }
    if (resid > tol) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "stationary_density: no convergence after %lld iterations, "
                      "last l1 residual %.3e",
                      static_cast<long long>(max_iter), resid);
        throw ConvergenceError(msg, resid, max_iter);
    }

    DensityEstimate D;
    D.edges = U.edges;
    D.iterations = it;
    D.final_residual = resid;
    D.cdf.assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        D.cdf[i + 1] = D.cdf[i] + w[i];
    const double total = D.cdf[m];
    D.density.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        w[i] /= total;
        D.density[i] = w[i] / U.bin_width(i);
    }
    for (std::size_t i = 0; i < m; ++i)
        D.cdf[i + 1] = D.cdf[i] + w[i];
    D.cdf[m] = 1.0; // exact unit mass by construction
    return D;
}

double measure_interval(const DensityEstimate& D, const Interval& b) {
    if (!b.valid())
        throw std::invalid_argument("measure_interval: invalid interval");
    return D.mass_upto(b.hi) - D.mass_upto(b.lo);
}

double invariance_residual(const DensityEstimate& D, const MapParams& params, int probes,
                           std::uint64_t seed) {
    if (probes < 1)
        throw std::invalid_argument("invariance_residual: probes must be >= 1");
    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) {
        double lo = rng.unit_oc();
        double hi = rng.unit_oc();
        if (lo > hi)
            std::swap(lo, hi);
        if (!(lo < hi)) {
            --k;
            continue;
        }
        const Interval b{lo, hi};
        const PreimagePair pre = preimage_interval(params, b);
        const double direct = measure_interval(D, b);
        const double pulled = measure_interval(D, pre.left) + measure_interval(D, pre.right);
        worst = std::max(worst, std::abs(pulled - direct));
    }
    return worst;
}

std::vector<double> sample_mu(const DensityEstimate& D, std::uint64_t seed, std::size_t n,
                              SamplingMode mode, const MapParams& params, int burn_in_steps) {
    if (n < 1)
        throw std::invalid_argument("sample_mu: n must be >= 1");
    Rng rng(seed);
    std::vector<double> out(n);
    if (mode == SamplingMode::inverse_cdf) {
        const std::size_t m = D.bin_count();
        for (std::size_t t = 0; t < n; ++t) {
            const double u = rng.unit_oc();
            const std::size_t j =
                static_cast<std::size_t>(std::lower_bound(D.cdf.begin(), D.cdf.end(), u) -
                                         D.cdf.begin());
            const std::size_t bin = j == 0 ? 0 : j - 1;
            double x = bin >= m ? 1.0
                                : (D.density[bin] > 0.0
                                       ? D.edges[bin] + (u - D.cdf[bin]) / D.density[bin]
                                       : D.edges[bin + 1]);
            out[t] = std::min(std::max(x, std::numeric_limits<double>::min()), 1.0);
        }
    } else {
        for (std::size_t t = 0; t < n; ++t) {
            double x = rng.unit_oc();
            for (int k = 0; k < burn_in_steps; ++k)
                x = apply_unchecked(params, x);
            out[t] = x;
        }
    }
    return out;
}

void write_density_csv(const DensityEstimate& D, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw std::runtime_error("write_density_csv: cannot open " + path);
    std::fputs("bin_lo,bin_hi,density\n", f);
    for (std::size_t i = 0; i < D.bin_count(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", D.edges[i], D.edges[i + 1], D.density[i]);
    std::fclose(f);
}

} // namespace bclab
