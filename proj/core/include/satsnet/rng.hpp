#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace satsnet {

/// Seeded random source with fully specified output streams.
///
/// std::uniform_real_distribution and std::normal_distribution are
/// implementation-defined; run reproducibility across standard libraries
/// requires pinning the mapping from raw mt19937_64 words to doubles, so
/// the conversions live here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard Box-Muller transform; consumes exactly two draws.
    double gaussian(double mean, double sd) {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream seed from (master, stream) via splitmix64.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace satsnet
