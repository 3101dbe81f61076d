// rng.hpp — counter-based splittable random streams for trajectory ensembles.
//
// Each trajectory gets an independent stream derived from (seed, stream index),
// so ensembles are reproducible regardless of how work is scheduled across
// threads.  SplitMix64 is used both to hash the pair and as the generator.

#pragma once

#include <cstdint>

namespace mist {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index) {
        // decorrelate the two words before mixing them into one state
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64_next(s);
        s = stream_index ^ 0x5851f42d4c957f2dULL;
        std::uint64_t b = splitmix64_next(s);
        state_ = a ^ (b + 0x9e3779b97f4a7c15ULL);
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform in [0, 1) with 53-bit resolution; never returns exactly 1
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]; safe as a quantum-jump threshold (never 0)
    double next_double_open0() { return 1.0 - next_double(); }

private:
    std::uint64_t state_;
};

} // namespace mist
