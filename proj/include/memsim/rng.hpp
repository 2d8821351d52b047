#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace memsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic random stream. The engine is mt19937_64; the uniform and
// normal transforms are spelled out here rather than taken from
// std::*_distribution, whose output is implementation-defined. Identical
// seeds give identical sequences on any standard library.
class SeedStream {
public:
    explicit SeedStream(std::uint64_t seed)
        : base_seed_(seed), eng_(splitmix64(seed)) {}

    std::uint64_t seed() const { return base_seed_; }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Independent child stream; forking does not perturb this stream.
    SeedStream fork(std::uint64_t tag) const {
        return SeedStream(splitmix64(base_seed_ ^ splitmix64(tag + 1)));
    }

private:
    std::uint64_t base_seed_;
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace memsim
