#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aquaaug/image.hpp"
#include "aquaaug/rng.hpp"

namespace testing {

inline aquaaug::ImageBuffer random_f32(int w, int h, int c, aquaaug::Stream& rng) {
  std::vector<float> px(static_cast<std::size_t>(w) * h * c);
  for (float& v : px) v = static_cast<float>(rng.uniform());
  return {w, h, c, std::move(px)};
}

inline aquaaug::ImageBuffer random_u8(int w, int h, int c, aquaaug::Stream& rng) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * c);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return {w, h, c, std::move(px)};
}

inline aquaaug::ImageBuffer constant_f32(int w, int h, int c, float v) {
  return {w, h, c, std::vector<float>(static_cast<std::size_t>(w) * h * c, v)};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("aquaaug_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
  return m;
}

}  // namespace testing
