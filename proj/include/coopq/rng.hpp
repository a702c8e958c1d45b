#pragma once

#include <array>
#include <cstdint>

namespace coopq {

// Deterministic, platform-independent RNG utilities.  Monte Carlo samples
// derive their own seed from (master_seed, sample_index), so results do not
// depend on scheduling or worker count.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based seed for sample k under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = master ^ (k * 0xD1B54A32D192ED03ULL + 0x9E3779B97F4A7C15ULL);
    return splitmix64(s) ^ a;
}

// xoshiro256++ seeded via splitmix64.
class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace coopq
