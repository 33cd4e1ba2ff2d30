#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace riscov::rng {

// Philox4x32-10 counter-based generator. A 128-bit counter and 64-bit key
// map to 128 output bits through 10 bijective rounds; distinct counters give
// independent outputs, so streams are addressed, not advanced. This is what
// makes Monte Carlo results independent of worker partitioning: the stream
// for (seed, trial, substream) is the same no matter which thread draws it.
struct PhiloxBlock {
  std::array<std::uint32_t, 4> w;
};

inline PhiloxBlock philox4x32_10(std::uint32_t k0, std::uint32_t k1,
                                 std::uint32_t c0, std::uint32_t c1,
                                 std::uint32_t c2, std::uint32_t c3) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
    const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
    const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
    const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
  }
  return PhiloxBlock{{c0, c1, c2, c3}};
}

// One addressed stream. Counter layout: c0 = running block index,
// c1 = substream id, c2/c3 = trial index split into 32-bit halves.
// Key = seed. Up to 2^32 blocks (2^33 uniforms) per (trial, substream).
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t trial, std::uint32_t substream)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        sub_(substream),
        trial_lo_(static_cast<std::uint32_t>(trial)),
        trial_hi_(static_cast<std::uint32_t>(trial >> 32)) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      buf_ = philox4x32_10(key0_, key1_, blk_++, sub_, trial_lo_, trial_hi_);
      pos_ = 0;
    }
    return buf_.w[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on the open interval (0,1); 53-bit resolution, never 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential with rate 1.
  double exponential() { return -std::log(uniform()); }

  // Gamma(shape m, scale 1) for integer m >= 1, as a sum of exponentials.
  double gamma_integer(int m) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += exponential();
    return acc;
  }

  // Exact Poisson sampling by CDF inversion. Small means walk up from 0;
  // large means seed the pmf at mu - 9*sqrt(mu) via lgamma to dodge
  // underflow and walk right. Cost is O(sqrt(mu)) per draw, negligible next
  // to the per-point work the counts gate.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double u = uniform();
    if (mean < 50.0) {
      double p = std::exp(-mean);
      double cdf = p;
      std::uint64_t k = 0;
      const std::uint64_t cap = static_cast<std::uint64_t>(mean + 20.0 * std::sqrt(mean) + 40.0);
      while (u > cdf && k < cap) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
      }
      return k;
    }
    const double sigma = std::sqrt(mean);
    const std::uint64_t k0 =
        static_cast<std::uint64_t>(std::max(0.0, std::floor(mean - 9.0 * sigma)));
    double k = static_cast<double>(k0);
    // pmf(k0) = exp(k0 ln mu - mu - lgamma(k0+1)); left tail below k0 holds
    // < 1e-18 of the mass, folded into the first step.
    double p = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
    double cdf = p;
    const double cap = mean + 12.0 * sigma + 30.0;
    while (u > cdf && k < cap) {
      k += 1.0;
      p *= mean / k;
      cdf += p;
    }
    return static_cast<std::uint64_t>(k);
  }

 private:
  std::uint32_t key0_, key1_;
  std::uint32_t sub_;
  std::uint32_t trial_lo_, trial_hi_;
  std::uint32_t blk_ = 0;
  PhiloxBlock buf_{};
  int pos_ = 4;
};

// Substream ids used by the simulator. Fixed here so that paired runs
// (common random numbers) line up across scenario variants.
enum Substream : std::uint32_t {
  kSubGeometry = 0,
  kSubDirect = 1,
  kSubServingRis = 2,
  kSubInterfererRis = 3,
};

}  // namespace riscov::rng
