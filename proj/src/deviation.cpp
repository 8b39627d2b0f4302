#include "bclab/deviation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace bclab {

DeviationReport deviation_report(const std::vector<double>& S, const std::vector<double>& E,
                                 const std::vector<double>& envelope) {
    if (S.size() != E.size() || S.size() != envelope.size())
        throw std::invalid_argument("deviation_report: length mismatch");
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    DeviationReport r;
    r.s = S;
    r.e = E;
    r.envelope = envelope;
    r.ratio.resize(S.size());
    r.normalized.resize(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) {
        r.ratio[k] = E[k] > 0.0 ? S[k] / E[k] : kNaN;
        r.normalized[k] =
            std::isfinite(envelope[k]) && envelope[k] > 0.0 ? (S[k] - E[k]) / envelope[k] : kNaN;
    }
    r.tail_max_abs_normalized = 0.0;
    for (std::size_t k = S.size() / 2; k < S.size(); ++k)
        if (std::isfinite(r.normalized[k]))
            r.tail_max_abs_normalized =
                std::max(r.tail_max_abs_normalized, std::abs(r.normalized[k]));
    r.last_ratio = kNaN;
    for (std::size_t k = S.size(); k-- > 0;)
        if (std::isfinite(r.ratio[k])) {
            r.last_ratio = r.ratio[k];
            break;
        }
    return r;
}

void write_deviation_csv(const DeviationReport& r, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw std::runtime_error("write_deviation_csv: cannot open " + path);
    std::fputs("n,S_n,E_n,ratio,envelope,normalized_deviation\n", f);
    for (std::size_t k = 0; k < r.s.size(); ++k)
        std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", k + 1, r.s[k], r.e[k], r.ratio[k],
                     r.envelope[k], r.normalized[k]);
    std::fclose(f);
}

} // namespace bclab
