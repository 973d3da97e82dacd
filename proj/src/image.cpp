#include "aquaaug/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "aquaaug/errors.hpp"

namespace aquaaug {

namespace {

void check_shape(int width, int height, int channels, std::size_t n) {
  if (width < 1 || height < 1) throw InvalidArgument("image dimensions must be positive");
  if (channels != 1 && channels != 3) throw InvalidArgument("channels must be 1 or 3");
  if (n != static_cast<std::size_t>(width) * height * channels)
    throw InvalidArgument("sample count does not match width*height*channels");
}

}  // namespace

const char* to_string(Depth d) { return d == Depth::U8 ? "u8" : "f32"; }

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels, samples.size());
  data_ = std::move(samples);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<float> samples)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels, samples.size());
  for (float v : samples)
    if (!(v >= 0.0f && v <= 1.0f)) throw InvalidArgument("F32 sample outside [0,1]");
  data_ = std::move(samples);
}

ImageBuffer ImageBuffer::zeros(int width, int height, int channels, Depth depth) {
  const std::size_t n = static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) *
                        std::max(channels, 0);
  if (depth == Depth::U8) return {width, height, channels, std::vector<std::uint8_t>(n, 0)};
  return {width, height, channels, std::vector<float>(n, 0.0f)};
}

Depth ImageBuffer::depth() const noexcept {
  return std::holds_alternative<std::vector<float>>(data_) ? Depth::F32 : Depth::U8;
}

std::span<float> ImageBuffer::f32() {
  if (auto* v = std::get_if<std::vector<float>>(&data_)) return *v;
  throw WrongDepth("expected an F32 image, got U8");
}

std::span<const float> ImageBuffer::f32() const {
  if (const auto* v = std::get_if<std::vector<float>>(&data_)) return *v;
  throw WrongDepth("expected an F32 image, got U8");
}

std::span<std::uint8_t> ImageBuffer::u8() {
  if (auto* v = std::get_if<std::vector<std::uint8_t>>(&data_)) return *v;
  throw WrongDepth("expected a U8 image, got F32");
}

std::span<const std::uint8_t> ImageBuffer::u8() const {
  if (const auto* v = std::get_if<std::vector<std::uint8_t>>(&data_)) return *v;
  throw WrongDepth("expected a U8 image, got F32");
}

bool ImageBuffer::operator==(const ImageBuffer& other) const {
  if (width_ != other.width_ || height_ != other.height_ || channels_ != other.channels_ ||
      depth() != other.depth())
    return false;
  if (depth() == Depth::U8) return std::ranges::equal(u8(), other.u8());
  // Bitwise, so that -0.0f and 0.0f are told apart.
  auto a = f32();
  auto b = other.f32();
  return std::memcmp(a.data(), b.data(), a.size_bytes()) == 0;
}

bool clamp_to_frame(BBox& box) {
  const double x0 = std::clamp(box.cx - box.w / 2, 0.0, 1.0);
  const double x1 = std::clamp(box.cx + box.w / 2, 0.0, 1.0);
  const double y0 = std::clamp(box.cy - box.h / 2, 0.0, 1.0);
  const double y1 = std::clamp(box.cy + box.h / 2, 0.0, 1.0);
  box.cx = snap_unit((x0 + x1) / 2);
  box.cy = snap_unit((y0 + y1) / 2);
  box.w = x1 - x0;
  box.h = y1 - y0;
  return box.w > 0.0 && box.h > 0.0;
}

ImageBuffer normalize(const ImageBuffer& img) {
  if (img.depth() != Depth::U8) throw WrongDepth("normalize expects a U8 image");
  auto src = img.u8();
  std::vector<float> out(src.size());
  std::ranges::transform(src, out.begin(),
                         [](std::uint8_t s) { return static_cast<float>(s / 255.0); });
  return {img.width(), img.height(), img.channels(), std::move(out)};
}

ImageBuffer to_u8(const ImageBuffer& img) {
  if (img.depth() == Depth::U8) return img;
  auto src = img.f32();
  std::vector<std::uint8_t> out(src.size());
  std::ranges::transform(src, out.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  });
  return {img.width(), img.height(), img.channels(), std::move(out)};
}

ImageBuffer as_f32(const ImageBuffer& img) {
  return img.depth() == Depth::F32 ? img : normalize(img);
}

}  // namespace aquaaug
