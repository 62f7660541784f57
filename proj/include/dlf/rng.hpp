#pragma once

#include <cstdint>
#include <random>

namespace dlf {

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for stream `stream` of a run seeded with `seed`. Used for
/// per-batch and per-asset streams so results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Seedable generator with a platform-independent output sequence.
/// std::mt19937_64 is bit-exact by the standard; the standard distributions
/// are not, so uniforms are built from the raw 64-bit output here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() noexcept { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace dlf
