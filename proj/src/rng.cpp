#include "svyr2/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "svyr2/errors.hpp"

namespace svyr2::rng {

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

Stream::Stream(std::uint64_t seed) {
  // SplitMix64 expansion; guarantees a nonzero xoshiro state.
  std::uint64_t x = seed;
  for (auto& w : s_) {
    w = mix64(x);
    x += 0x9E3779B97F4A7C15ULL;
  }
}

std::uint64_t Stream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Stream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  // 1-u1 lies in (0, 1], keeping the log argument positive.
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_normal_ = true;
  return r * std::cos(a);
}

std::uint64_t Stream::next_below(std::uint64_t n) {
  if (n == 0) throw InvalidArgumentError("next_below: n must be positive");
  // Lemire 2019, unbiased via 128-bit multiply with rejection.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::uint32_t> sample_without_replacement(Stream& stream, std::uint32_t n,
                                                      std::uint32_t k) {
  if (k > n) throw InvalidArgumentError("sample_without_replacement: k > n");
  std::unordered_set<std::uint32_t> chosen;
  chosen.reserve(k * 2);
  for (std::uint32_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::uint32_t>(stream.next_below(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint32_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace svyr2::rng
