#pragma once

// Deterministic random utilities. Every random draw in the library flows
// through SplitMix64 with hand-rolled real-valued transforms, because the
// <random> distributions are implementation-defined and would break
// bit-reproducibility across standard libraries.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace sfw {

// SplitMix64 (Steele, Lea and Flood's SplittableRandom mix). Counter-based:
// the state advances by a fixed odd constant and the output is a bijective
// scramble of the counter, so streams never collide for distinct seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t x) { return SplitMix64(x).next(); }

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Seed of a named sub-stream. Streams are independent per label, and indexed
// draws within one stream are stable: extending the index range of one stream
// never reshuffles another.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index = 0) {
  SplitMix64 g(master ^ fnv1a64(label));
  return mix64(g.next() + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_.next(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((gen_.next() >> 11) + 1) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n). Rejects the incomplete tail block of 2^64.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    for (;;) {
      const std::uint64_t x = gen_.next();
      const std::uint64_t r = x % n;
      if (x - r <= std::uint64_t(0) - n) return r;
    }
  }

  // Standard normal via the Marsaglia polar method. The candidate pair is
  // drawn in a fixed order and the spare deviate is handed out before any new
  // draw, so the stream position is a pure function of the call count.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  SplitMix64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sfw
