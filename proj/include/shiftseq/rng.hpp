// Seeded random streams. Every random quantity in the library is drawn from
// a stream keyed by (seed, label, index), so Monte-Carlo trials can be
// partitioned across workers without changing any result.
#pragma once

#include <cstdint>
#include <string_view>

namespace shiftseq {

namespace detail {

// splitmix64 finalizer (Vigna). Used for key derivation and generator seeding.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// FNV-1a, 64-bit. std::hash is not stable across implementations; this is.
inline std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

// xoshiro256++ (Blackman & Vigna), seeded via splitmix64. Satisfies
// UniformRandomBitGenerator, so it drives the <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = detail::mix64(s = detail::mix64(s));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

  result_type operator()() {
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

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Derives the key for a named substream. Labels keep unrelated uses of the
// same top-level seed (design init, fluctuation draws, data sampling, ...)
// statistically independent; the index gives per-trial / per-node streams.
inline std::uint64_t stream_key(std::uint64_t seed, std::string_view label,
                                std::uint64_t index = 0) {
  std::uint64_t k = detail::mix64(seed ^ detail::hash_label(label));
  return detail::mix64(k ^ (0x9e3779b97f4a7c15ull * (index + 1)));
}

inline Rng substream(std::uint64_t seed, std::string_view label,
                     std::uint64_t index = 0) {
  return Rng(stream_key(seed, label, index));
}

}  // namespace shiftseq
