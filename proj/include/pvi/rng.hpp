#pragma once

#include <array>
#include <cstdint>
#include <span>

// Counter-based random number generation for reproducible parallel
// simulation. Each (seed, rollout) pair owns an independent stream; draws
// are addressed by (day, draw index within the day), so rollouts can run on
// any number of threads, in any order, and still see identical numbers.

namespace pvi {

// Philox 4x32-10 block cipher (Salmon et al., SC'11).
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMulA = 0xD2511F53u, kMulB = 0xCD9E8D57u;
    constexpr std::uint32_t kWeylA = 0x9E3779B9u, kWeylB = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * counter[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * counter[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    return counter;
  }
};

// One stream of a keyed counter-based generator. The stream is identified by
// (base_seed + rollout_index); the counter carries (day, draw index).
class RolloutRng {
 public:
  RolloutRng(std::uint64_t base_seed, std::uint64_t rollout_index)
      : key_{static_cast<std::uint32_t>(base_seed + rollout_index),
             static_cast<std::uint32_t>((base_seed + rollout_index) >> 32)} {}

  void begin_day(std::uint32_t day) {
    day_ = day;
    draw_ = 0;
  }

  std::uint64_t next_u64() {
    const auto out = Philox4x32::block({day_, draw_++, 0x7F4A7C15u, 0u}, key_);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t day_ = 0;
  std::uint32_t draw_ = 0;
};

// Inverse-CDF sample from a cumulative vector; one uniform per draw.
inline int sample_from_cdf(std::span<const double> cdf, double u) {
  int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (cdf[mid] > u)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

// Binomial(trials, p) by walking the pmf recurrence; one uniform per draw.
inline int sample_binomial(int trials, double p, double u) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  const double ratio = p / (1.0 - p);
  double mass = 1.0;
  for (int i = 0; i < trials; ++i) mass *= 1.0 - p;
  double cum = mass;
  int k = 0;
  while (cum <= u && k < trials) {
    mass *= ratio * (trials - k) / (k + 1);
    cum += mass;
    ++k;
  }
  return k;
}

// Multinomial(trials, probs) via sequential binomial thinning in category
// order; consumes one uniform per category but the last.
inline void sample_multinomial(int trials, std::span<const double> probs, std::span<int> out,
                               RolloutRng& rng) {
  int remaining = trials;
  double mass_left = 1.0;
  const std::size_t m = probs.size();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (remaining == 0 || mass_left <= 0.0) {
      out[k] = 0;
      continue;
    }
    const double cond = probs[k] / mass_left;
    out[k] = sample_binomial(remaining, cond < 1.0 ? cond : 1.0, rng.uniform());
    remaining -= out[k];
    mass_left -= probs[k];
  }
  out[m - 1] = remaining;
}

}  // namespace pvi
