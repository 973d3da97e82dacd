#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace aquaaug {

enum class Depth { U8, F32 };

const char* to_string(Depth d);

/// Row-major, channel-interleaved raster. Sample (x, y, c) lives at
/// (y * width + x) * channels + c.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> samples);
  ImageBuffer(int width, int height, int channels, std::vector<float> samples);

  static ImageBuffer zeros(int width, int height, int channels, Depth depth);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  Depth depth() const noexcept;
  bool empty() const noexcept { return width_ == 0; }
  std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_ * channels_;
  }
  std::size_t index(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  // Throw WrongDepth when the buffer holds the other sample type.
  std::span<float> f32();
  std::span<const float> f32() const;
  std::span<std::uint8_t> u8();
  std::span<const std::uint8_t> u8() const;

  /// Exact comparison of shape, depth and every sample.
  bool operator==(const ImageBuffer& other) const;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::variant<std::vector<std::uint8_t>, std::vector<float>> data_;
};

/// Normalized centre-format box. cx, cy, w, h are fractions of the image frame.
struct BBox {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double visibility = 1.0;

  bool operator==(const BBox&) const = default;
};

struct AnnotationSet {
  std::string image_id;
  std::vector<BBox> boxes;

  bool operator==(const AnnotationSet&) const = default;
};

/// Round a unit-interval coordinate onto the 2^-52 grid. On that grid
/// 1 - v is exact, which makes horizontal reflection an exact involution.
inline double snap_unit(double v) { return (v + 1.0) - 1.0; }

/// Clip the box extent to [0,1] on both axes. Returns false if nothing is left.
bool clamp_to_frame(BBox& box);

/// Divide every U8 sample by 255.0. Throws WrongDepth on F32 input.
ImageBuffer normalize(const ImageBuffer& img);

/// Quantize an F32 image back to U8 with round-to-nearest after clamping.
ImageBuffer to_u8(const ImageBuffer& img);

/// Ensure F32 samples: U8 inputs go through normalize(), F32 inputs are copied.
ImageBuffer as_f32(const ImageBuffer& img);

}  // namespace aquaaug
