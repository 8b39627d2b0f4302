#pragma once

#include <cstdint>
#include <random>

namespace bclab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable sub-stream seed: trajectory t of a run seeded s uses derive_seed(s, t).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    splitmix64(s);
    return splitmix64(s);
}

// mt19937_64 with an explicit uint64 -> double mapping, so streams are
// reproducible independent of the standard library's distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0,1)
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform in (0,1]
    double unit_oc() { return 1.0 - unit(); }

  private:
    std::mt19937_64 eng_;
};

} // namespace bclab
