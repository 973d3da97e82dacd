#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace aquaaug {

/// Counter-based random stream: draw n is mix64(key + (n + 1) * golden_gamma).
/// The sequence depends only on the key, so streams can be created in any
/// order without coupling. All derived draws (doubles, bounded integers) use
/// explicit arithmetic rather than <random> distributions so the values are
/// identical on every platform.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;
  bool bernoulli(double p) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a.
std::uint64_t hash_bytes(std::string_view bytes) noexcept;

/// Substream keyed by (global_seed, image_id, stage).
Stream derive_stream(std::uint64_t global_seed, std::string_view image_id, std::string_view stage);

}  // namespace aquaaug
