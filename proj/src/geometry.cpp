#include "aquaaug/geometry.hpp"

#include <algorithm>

namespace aquaaug {

namespace {

template <typename T>
void mirror_rows(std::span<const T> src, std::span<T> dst, int w, int h, int c) {
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t from = (static_cast<std::size_t>(y) * w + x) * c;
      const std::size_t to = (static_cast<std::size_t>(y) * w + (w - 1 - x)) * c;
      std::copy_n(src.begin() + from, c, dst.begin() + to);
    }
}

}  // namespace

std::pair<ImageBuffer, AnnotationSet> hflip(const ImageBuffer& img, const AnnotationSet& ann) {
  ImageBuffer out = ImageBuffer::zeros(img.width(), img.height(), img.channels(), img.depth());
  if (img.depth() == Depth::U8)
    mirror_rows<std::uint8_t>(img.u8(), out.u8(), img.width(), img.height(), img.channels());
  else
    mirror_rows<float>(img.f32(), out.f32(), img.width(), img.height(), img.channels());

  AnnotationSet flipped = ann;
  for (BBox& b : flipped.boxes) b.cx = 1.0 - b.cx;
  return {std::move(out), std::move(flipped)};
}

}  // namespace aquaaug
