#pragma once

#include <boost/random/mersenne_twister.hpp>

#include <cstdint>

namespace edfsim {

/// Pseudo-random engine shared by all generators.
using Engine = boost::random::mt19937_64;

/// Identifier of the stream-splitting scheme; bump when derivation changes.
inline constexpr const char* kRngScheme = "mt19937_64+splitmix64/v1";

/// Independent sub-streams derived from one master seed.
enum class Substream : std::uint64_t {
    interarrival = 1,
    service = 2,
    lead = 3,
    policy = 4,
    brownian = 5,
};

/// SplitMix64 finalizer, used only to decorrelate seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of sub-stream `stream`, replica `replica`, under master seed `master`.
/// Each component passes through the mixer so neighbouring seeds, streams and
/// replicas map to unrelated engine states.
constexpr std::uint64_t substream_seed(std::uint64_t master, Substream stream, std::uint64_t replica = 0) {
    return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(stream)) ^ replica);
}

inline Engine make_engine(std::uint64_t master, Substream stream, std::uint64_t replica = 0) {
    return Engine(substream_seed(master, stream, replica));
}

}  // namespace edfsim
