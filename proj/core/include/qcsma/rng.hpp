#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace qcsma {

// SplitMix64: a Weyl counter pushed through a 64-bit finalizer. Streams are
// addressed by hashing (seed, replica, node, purpose) into the start counter,
// which makes every per-node stream reproducible in isolation.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return finalize(state_ += kGolden); }

  static constexpr std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto p : parts) h = SplitMix64::finalize(h ^ (p + SplitMix64::kGolden + (h << 6) + (h >> 2)));
  return h;
}

enum class StreamPurpose : std::uint64_t {
  Arrival = 1,
  Deactivation = 2,
  Activation = 3,
  Tick = 4,
  TubeInput = 5,
};

inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t node, StreamPurpose purpose) {
  return SplitMix64(mix_key({seed, node, static_cast<std::uint64_t>(purpose)}));
}

inline std::uint64_t replica_seed(std::uint64_t base, std::uint64_t index) {
  return mix_key({base, index, 0x7265706cULL});
}

// Uniform on the open interval (0, 1).
inline double uniform01(SplitMix64& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

inline double exponential(SplitMix64& g, double rate = 1.0) {
  return -std::log(uniform01(g)) / rate;
}

}  // namespace qcsma
