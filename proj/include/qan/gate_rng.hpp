#pragma once

#include <cstdint>

namespace qan {

/// Stateless counter-based random stream: every draw is a pure function of
/// (seed, gate index, channel). Workers can therefore evaluate any gate in
/// any order, or lazily skip draws, without perturbing the stream — the full
/// session is reproducible from the seed alone regardless of partitioning.
class GateRng {
public:
    // Draw channels per gate. Values must stay below kChannelBits capacity.
    enum Channel : std::uint32_t {
        kLevel = 0,
        kBasis = 1,
        kBit = 2,
        kPhoton = 3,
        kDark = 4,
        kRxBasis = 5,
        kPhotonError = 6,
        kNoiseBit = 7,
        kAfterpulseFire = 8,
        kAfterpulseTarget = 9,
        kSpillFire = 10,
        kSpillSeparation = 11,
    };
    static constexpr std::uint32_t kChannelBits = 5;

    explicit GateRng(std::uint64_t seed) : seed_hash_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t bits(std::uint64_t gate, Channel channel) const {
        return mix(mix((gate << kChannelBits) | channel) ^ seed_hash_);
    }

    /// Uniform double in [0,1).
    double uniform(std::uint64_t gate, Channel channel) const {
        return static_cast<double>(bits(gate, channel) >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_hash_;
};

}  // namespace qan
