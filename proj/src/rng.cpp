#include "aquaaug/rng.hpp"

namespace aquaaug {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t hash_bytes(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t Stream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Stream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

std::int64_t Stream::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
  if (hi <= lo) return lo;
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
  // Reject the top sliver so every residue is equally likely.
  const std::uint64_t limit = max() - max() % span;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

bool Stream::bernoulli(double p) noexcept {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

Stream derive_stream(std::uint64_t global_seed, std::string_view image_id, std::string_view stage) {
  // Length-prefix the strings so ("ab","c") and ("a","bc") key differently.
  std::uint64_t k = mix64(global_seed ^ 0x243F6A8885A308D3ull);
  k = mix64(k ^ hash_bytes(image_id) ^ (image_id.size() * kGamma));
  k = mix64(k ^ hash_bytes(stage) ^ (stage.size() * 0xD1B54A32D192ED03ull));
  return Stream(k);
}

}  // namespace aquaaug
