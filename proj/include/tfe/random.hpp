#ifndef TFE_RANDOM_HPP
#define TFE_RANDOM_HPP

#include <cstdint>
#include <random>

namespace tfe {

/// SplitMix64 output finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Stream seed for mode `k` of replication `rep`.
///
/// Frozen layout: the pair is packed as (rep << 32) | k and combined with a
/// finalized master seed, then finalized again. For a fixed master the map
/// (rep, k) -> seed is injective whenever rep, k < 2^32, because every step
/// is a bijection of the packed word.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t rep, std::uint64_t k);

/// Standard normal variates from a seeded std::mt19937_64.
///
/// Uses the Marsaglia polar method on 53-bit uniforms built directly from
/// engine output, so the stream is identical on every conforming standard
/// library (std::normal_distribution is not).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double operator()();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tfe

#endif  // TFE_RANDOM_HPP
