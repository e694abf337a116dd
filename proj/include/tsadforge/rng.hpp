#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

namespace tsadforge {

/// SplitMix64 finalizer; a bijective 64-bit avalanche mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

/// Fixed set of generation stages; each owns an independent random stream.
enum class Stage { Blueprint, Trend, Season, Noise, Dag, Arx, Anomaly, Volatility };

std::string_view stage_tag(Stage stage) noexcept;

/// Counter-based generator: draw k is mix64(key + k * golden), so the state is
/// just (key, counter) and streams with distinct keys never need coordination.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Index drawn proportionally to nonnegative weights.
  std::size_t categorical(std::span<const double> weights) noexcept;

  /// Child stream keyed by (this key, k); does not advance this stream.
  RngStream fork(std::uint64_t k) const noexcept { return RngStream(mix64(key_ ^ mix64(k + kGolden))); }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_normal_;
};

/// Per-sample seed; every stage stream of a sample hangs off it.
std::uint64_t sample_sub_seed(std::uint64_t master_seed, std::uint64_t sample_index) noexcept;

RngStream derive_stream(std::uint64_t sub_seed, Stage stage) noexcept;

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t sample_index, Stage stage) noexcept {
  return derive_stream(sample_sub_seed(master_seed, sample_index), stage);
}

}  // namespace tsadforge
