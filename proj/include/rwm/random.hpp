#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rwm {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Random stream owned by one replica, particle block or oracle chunk.
///
/// Streams are addressed by a root seed and a path of integers, e.g.
/// (seed, {tag, replica}); distinct paths give unrelated engine states, so
/// work can be split across threads without changing any draw.
class Stream {
 public:
  using Engine = std::mt19937_64;

  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(mix64(h)),
                      static_cast<std::uint32_t>(mix64(h) >> 32)};
    engine_.seed(seq);
  }

  double gaussian() { return normal_(engine_); }

  /// Uniform on (0, 1].
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  Engine& engine() { return engine_; }

 private:
  Engine engine_;
  std::normal_distribution<double> normal_;
};

/// Stream path tags, so different consumers of one seed never collide.
enum class StreamTag : std::uint64_t {
  kChainReplica = 1,
  kEnsembleBlock = 2,
  kIdentityOracle = 3,
  kBootstrap = 4,
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace rwm
