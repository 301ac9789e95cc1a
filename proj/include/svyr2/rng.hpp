#pragma once

// Deterministic, streamable RNG with documented substream derivation.
// All randomized code in this library draws from Stream so that results are
// reproducible byte-for-byte for a fixed seed, independent of thread count
// and execution order. The full generator contract (mixing function, stream
// layout, draw algorithms) is spelled out in README.md; any reimplementation
// that follows it reproduces the same draws.

#include <array>
#include <cstdint>
#include <vector>

namespace svyr2::rng {

// SplitMix64 step: golden-ratio increment followed by the finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a 64-bit over the tag string; purpose tags are human-readable names.
constexpr std::uint64_t tag(const char* s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001B3ULL;
  return h;
}

// substream = mix(mix(mix(base) ^ tag) ^ index). Distinct (tag, index)
// pairs give independent streams from one user-visible base seed.
constexpr std::uint64_t substream(std::uint64_t base_seed, std::uint64_t purpose_tag,
                                  std::uint64_t index) {
  return mix64(mix64(mix64(base_seed) ^ purpose_tag) ^ index);
}

inline constexpr std::uint64_t kTagPopulation = tag("population");
inline constexpr std::uint64_t kTagTable2 = tag("table2.replicate");
inline constexpr std::uint64_t kTagHeuristic = tag("heuristic.sample");
inline constexpr std::uint64_t kTagTwoPhaseCohort = tag("twophase.cohort");
inline constexpr std::uint64_t kTagTwoPhaseCc = tag("twophase.casecontrol");
inline constexpr std::uint64_t kTagTwoPhaseBal = tag("twophase.balanced");

// xoshiro256++ seeded by SplitMix64 expansion of a 64-bit stream seed.
class Stream {
public:
  explicit Stream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1): top 53 bits scaled by 2^-53.
  double next_uniform();

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double next_normal();

  // Uniform integer on [0, n); Lemire's unbiased multiply-shift rejection.
  std::uint64_t next_below(std::uint64_t n);

private:
  std::array<std::uint64_t, 4> s_;
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

// k distinct indices from [0, n), returned ascending. Floyd's algorithm:
// exactly k next_below calls regardless of outcome, so the stream position
// after a draw depends only on (n, k).
std::vector<std::uint32_t> sample_without_replacement(Stream& stream, std::uint32_t n,
                                                      std::uint32_t k);

}  // namespace svyr2::rng
