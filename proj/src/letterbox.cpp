#include "aquaaug/letterbox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "aquaaug/errors.hpp"

namespace aquaaug {

namespace {

struct Tap {
  int i0;
  int i1;
  double frac;
};

std::vector<Tap> bilinear_taps(int src, int dst) {
  std::vector<Tap> taps(dst);
  const double ratio = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    const double s = std::clamp((d + 0.5) * ratio - 0.5, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    taps[d] = {i0, std::min(i0 + 1, src - 1), s - i0};
  }
  return taps;
}

template <typename T, typename Store>
void resample(std::span<const T> src, int sw, int c, std::span<T> dst, int dw, int dh,
              const std::vector<Tap>& xs, const std::vector<Tap>& ys, Store store) {
  for (int y = 0; y < dh; ++y) {
    const Tap& ty = ys[y];
    for (int x = 0; x < dw; ++x) {
      const Tap& tx = xs[x];
      for (int k = 0; k < c; ++k) {
        const auto at = [&](int xx, int yy) {
          return static_cast<double>(src[(static_cast<std::size_t>(yy) * sw + xx) * c + k]);
        };
        const double top = at(tx.i0, ty.i0) * (1.0 - tx.frac) + at(tx.i1, ty.i0) * tx.frac;
        const double bot = at(tx.i0, ty.i1) * (1.0 - tx.frac) + at(tx.i1, ty.i1) * tx.frac;
        dst[(static_cast<std::size_t>(y) * dw + x) * c + k] =
            store(top * (1.0 - ty.frac) + bot * ty.frac);
      }
    }
  }
}

}  // namespace

LetterboxGeometry letterbox_geometry(int width, int height, int target) {
  if (target < 32) throw InvalidArgument("letterbox target must be >= 32");
  if (width < 1 || height < 1) throw InvalidArgument("letterbox needs a non-empty image");

  LetterboxGeometry g;
  g.target = target;
  const double scale = static_cast<double>(target) / std::max(width, height);
  g.content_width =
      width >= height ? target : std::clamp(static_cast<int>(std::lround(width * scale)), 1, target);
  g.content_height = height >= width
                         ? target
                         : std::clamp(static_cast<int>(std::lround(height * scale)), 1, target);
  const int pad_x = target - g.content_width;
  const int pad_y = target - g.content_height;
  g.pad_left = pad_x / 2;
  g.pad_right = pad_x - g.pad_left;
  g.pad_top = pad_y / 2;
  g.pad_bottom = pad_y - g.pad_top;
  return g;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_width, int out_height) {
  if (out_width == img.width() && out_height == img.height()) return img;
  const auto xs = bilinear_taps(img.width(), out_width);
  const auto ys = bilinear_taps(img.height(), out_height);
  ImageBuffer out = ImageBuffer::zeros(out_width, out_height, img.channels(), img.depth());
  if (img.depth() == Depth::U8) {
    resample<std::uint8_t>(img.u8(), img.width(), img.channels(), out.u8(), out_width, out_height,
                           xs, ys, [](double v) {
                             return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
                           });
  } else {
    resample<float>(img.f32(), img.width(), img.channels(), out.f32(), out_width, out_height, xs,
                    ys, [](double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); });
  }
  return out;
}

LetterboxResult letterbox_resize(const ImageBuffer& img, const AnnotationSet& ann, int target) {
  if (img.empty()) throw InvalidArgument("letterbox needs a non-empty image");
  LetterboxResult res;
  res.geometry = letterbox_geometry(img.width(), img.height(), target);
  const auto& g = res.geometry;

  if (img.width() == target && img.height() == target) {
    res.image = img;
    res.annotations = ann;
    return res;
  }

  const ImageBuffer content = resize_bilinear(img, g.content_width, g.content_height);
  res.image = ImageBuffer::zeros(target, target, img.channels(), img.depth());
  const std::size_t row = static_cast<std::size_t>(g.content_width) * img.channels();
  for (int y = 0; y < g.content_height; ++y) {
    const std::size_t src = static_cast<std::size_t>(y) * row;
    const std::size_t dst = res.image.index(g.pad_left, y + g.pad_top);
    if (img.depth() == Depth::U8)
      std::copy_n(content.u8().begin() + src, row, res.image.u8().begin() + dst);
    else
      std::copy_n(content.f32().begin() + src, row, res.image.f32().begin() + dst);
  }

  res.annotations.image_id = ann.image_id;
  const double t = target;
  for (const BBox& in : ann.boxes) {
    BBox b = in;
    b.cx = (in.cx * g.content_width + g.pad_left) / t;
    b.cy = (in.cy * g.content_height + g.pad_top) / t;
    b.w = in.w * g.content_width / t;
    b.h = in.h * g.content_height / t;
    if (!clamp_to_frame(b)) {
      res.warnings.push_back("box of class " + std::to_string(in.class_id) + " in " + ann.image_id +
                             " collapsed to zero area and was dropped");
      continue;
    }
    res.annotations.boxes.push_back(b);
  }
  return res;
}

}  // namespace aquaaug
