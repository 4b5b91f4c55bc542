#pragma once

#include <cstdint>

namespace rqproc {

// Counter-based generator: every draw is a pure function of
// (seed, stream, replicate, index), so parallel replicates can be evaluated
// in any order and still reproduce bit-identical streams.
class CounterRng {
 public:
  // Stream ids keep logically distinct draws (errors, covariates, probes)
  // from colliding even when they share a replicate index.
  enum Stream : std::uint64_t {
    errors = 0,
    design = 1,
    probes = 2,
    misc = 3,
  };

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t replicate)
      : key_(mix(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ (stream * 0xbf58476d1ce4e5b9ull)) ^
                 (replicate * 0x94d049bb133111ebull))) {}

  // Uniform double in the open interval (0, 1).
  double uniform(std::uint64_t index) const {
    const std::uint64_t bits = mix(key_ ^ (index * 0xd6e8feb86659fd93ull));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t bits(std::uint64_t index) const {
    return mix(key_ ^ (index * 0xd6e8feb86659fd93ull));
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace rqproc
