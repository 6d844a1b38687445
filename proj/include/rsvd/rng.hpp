#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rsvd {

/// Deterministic 64-bit generator built on the SplitMix64 finalizer.
///
/// Streams are derived, not jumped: `Rng::stream(seed, tag, index)` mixes the
/// master seed with a purpose tag and an element index through two SplitMix64
/// finalization rounds, so any (tag, index) substream can be constructed
/// independently of every other. This is what makes sampling reproducible
/// under per-column or per-trial parallelism: the stream layout is part of
/// the contract, not an artifact of iteration order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Substream (tag, index) of a master seed.
  static Rng stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::uint64_t s = mix(seed + kGolden * (tag + 1));
    s = mix(s ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    return Rng(s);
  }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one spare cached).
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// +1 or -1 with equal probability.
  double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Multiply-shift; bias is negligible for the n used here (n << 2^64).
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Student-t with 5 degrees of freedom, standardized to unit variance.
  double next_student_t5_unit() {
    const double z = next_gaussian();
    double chi2 = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double g = next_gaussian();
      chi2 += g * g;
    }
    const double t = z / std::sqrt(chi2 / 5.0);
    return t * std::sqrt(3.0 / 5.0);  // Var(t_5) = 5/3
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream tags used across the library. Documented so that the derivation
/// seed -> (operator, per-column streams) is reproducible from the outside.
namespace stream_tag {
inline constexpr std::uint64_t sketch_column = 1;   // sketch entries, per column
inline constexpr std::uint64_t sketch_support = 2;  // signs / sampled rows
inline constexpr std::uint64_t signal_u = 3;        // left factor, per column
inline constexpr std::uint64_t signal_v = 4;        // right factor, per column
inline constexpr std::uint64_t noise = 5;           // noise matrix, per column
inline constexpr std::uint64_t trial = 6;           // harness trials
}  // namespace stream_tag

}  // namespace rsvd
