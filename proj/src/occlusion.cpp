#include "aquaaug/occlusion.hpp"

#include <algorithm>
#include <cmath>

#include "aquaaug/errors.hpp"

namespace aquaaug {

namespace {

constexpr int kGateAttempts = 10;

struct PixelSpan {
  int lo = 0;  // inclusive
  int hi = 0;  // exclusive
};

// Pixels whose centres i + 0.5 fall inside [a, b).
PixelSpan centre_span(double a, double b, int n) {
  const int lo = std::clamp(static_cast<int>(std::ceil(a - 0.5)), 0, n);
  const int hi = std::clamp(static_cast<int>(std::ceil(b - 0.5)), 0, n);
  return {lo, std::max(lo, hi)};
}

double luma(std::span<const float> px, std::size_t i, int channels) {
  if (channels == 1) return px[i];
  return 0.299 * px[i] + 0.587 * px[i + 1] + 0.114 * px[i + 2];
}

}  // namespace

const char* to_string(EraseFill f) {
  return f == EraseFill::UniformNoise ? "uniform_noise" : "channel_mean";
}

EraseFill parse_erase_fill(const std::string& s) {
  if (s == "uniform_noise") return EraseFill::UniformNoise;
  if (s == "channel_mean") return EraseFill::ChannelMean;
  throw InvalidArgument("unknown erase fill '" + s + "'");
}

void EraseConfig::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0))
    throw InvalidArgument("erase probability must lie in [0,1]");
  if (max_occluders < 1) throw InvalidArgument("max_occluders must be >= 1");
  if (!(fractal_dim >= 1.0 && fractal_dim <= 2.0))
    throw InvalidArgument("fractal dimension must lie in [1,2]");
  // area_min == area_max is allowed: it pins every occluder to one size.
  if (!(area_min > 0.0 && area_min <= area_max && area_max <= 0.5))
    throw InvalidArgument("erase areas need 0 < area_min <= area_max <= 0.5");
  if (!(tau >= 0.0)) throw InvalidArgument("tau must be non-negative");
  if (!(drop_visibility_below >= 0.0 && drop_visibility_below <= 1.0))
    throw InvalidArgument("drop_visibility_below must lie in [0,1]");
}

double sample_truncated_pareto(double lo, double hi, double alpha, Stream& rng) {
  const double u = rng.uniform();
  if (hi <= lo) return lo;
  const double lo_a = std::pow(lo, -alpha);
  const double hi_a = std::pow(hi, -alpha);
  const double a = std::pow(lo_a - u * (lo_a - hi_a), -1.0 / alpha);
  return std::clamp(a, lo, hi);
}

Rect draw_occluder(const EraseConfig& cfg, int width, int height, Stream& rng) {
  const double frac =
      sample_truncated_pareto(cfg.area_min, cfg.area_max, cfg.fractal_dim / 2.0, rng);
  const double aspect = rng.uniform(0.5, 2.0);
  const double area = frac * width * height;
  // Floor keeps every rectangle within its sampled area budget.
  Rect r;
  r.w = std::clamp(static_cast<int>(std::floor(std::sqrt(area * aspect))), 1, width);
  r.h = std::clamp(static_cast<int>(std::floor(std::sqrt(area / aspect))), 1, height);
  r.x = static_cast<int>(rng.uniform_int(0, width - r.w));
  r.y = static_cast<int>(rng.uniform_int(0, height - r.h));
  return r;
}

std::vector<Rect> sample_occluders(const EraseConfig& cfg, int width, int height, Stream& rng) {
  cfg.validate();
  std::vector<Rect> rects;
  if (!rng.bernoulli(cfg.probability)) return rects;
  const auto k = rng.uniform_int(1, cfg.max_occluders);
  for (std::int64_t i = 0; i < k; ++i) rects.push_back(draw_occluder(cfg, width, height, rng));
  return rects;
}

double mean_cross_derivative(const ImageBuffer& img, const Rect& r) {
  if (r.w < 2 || r.h < 2) return 0.0;
  auto px = img.f32();
  const int c = img.channels();
  double acc = 0.0;
  for (int y = r.y; y < r.y + r.h - 1; ++y)
    for (int x = r.x; x < r.x + r.w - 1; ++x) {
      const double d = luma(px, img.index(x + 1, y + 1), c) - luma(px, img.index(x + 1, y), c) -
                       luma(px, img.index(x, y + 1), c) + luma(px, img.index(x, y), c);
      acc += std::abs(d);
    }
  return acc / (static_cast<double>(r.w - 1) * (r.h - 1));
}

std::int64_t box_pixel_count(const BBox& box, int width, int height) {
  const auto xs = centre_span((box.cx - box.w / 2) * width, (box.cx + box.w / 2) * width, width);
  const auto ys =
      centre_span((box.cy - box.h / 2) * height, (box.cy + box.h / 2) * height, height);
  return static_cast<std::int64_t>(xs.hi - xs.lo) * (ys.hi - ys.lo);
}

EraseResult apply_erase(const ImageBuffer& img, const AnnotationSet& ann, const EraseConfig& cfg,
                        Stream& rng) {
  cfg.validate();
  if (img.depth() != Depth::F32) throw WrongDepth("apply_erase expects an F32 image");
  std::vector<Rect> rects;
  if (rng.bernoulli(cfg.probability)) {
    const auto k = rng.uniform_int(1, cfg.max_occluders);
    for (std::int64_t i = 0; i < k; ++i) {
      if (cfg.tau <= 0.0) {
        rects.push_back(draw_occluder(cfg, img.width(), img.height(), rng));
        continue;
      }
      for (int attempt = 0; attempt < kGateAttempts; ++attempt) {
        const Rect r = draw_occluder(cfg, img.width(), img.height(), rng);
        if (mean_cross_derivative(img, r) > cfg.tau) {
          rects.push_back(r);
          break;
        }
      }
    }
  }
  const std::uint64_t fill_seed = rects.empty() ? 0 : rng.next_u64();
  return erase_rects(img, ann, cfg, rects, fill_seed);
}

EraseResult erase_rects(const ImageBuffer& img, const AnnotationSet& ann, const EraseConfig& cfg,
                        const std::vector<Rect>& rects, std::uint64_t fill_seed) {
  if (img.depth() != Depth::F32) throw WrongDepth("erase expects an F32 image");
  EraseResult res{img, ann, {rects, fill_seed, {}}};
  if (rects.empty()) {
    res.record.visibility_deltas.assign(ann.boxes.size(), 0.0);
    return res;
  }
  const int width = img.width();
  const int height = img.height();
  const int c = img.channels();
  for (const Rect& r : rects)
    if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > width || r.y + r.h > height)
      throw InvalidArgument("erase rectangle outside image bounds");

  std::vector<float> mean(c, 0.0f);
  if (cfg.fill == EraseFill::ChannelMean) {
    auto src = img.f32();
    std::vector<double> acc(c, 0.0);
    for (std::size_t i = 0; i < src.size(); ++i) acc[i % c] += src[i];
    const double n = static_cast<double>(width) * height;
    for (int k = 0; k < c; ++k) mean[k] = static_cast<float>(acc[k] / n);
  }

  Stream noise(fill_seed);
  auto dst = res.image.f32();
  for (const Rect& r : rects)
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x)
        for (int k = 0; k < c; ++k)
          dst[img.index(x, y, k)] = cfg.fill == EraseFill::UniformNoise
                                        ? static_cast<float>(noise.uniform())
                                        : mean[k];

  // Visibility from an exact per-box coverage mask so overlapping rects count once.
  res.annotations.boxes.clear();
  for (const BBox& in : ann.boxes) {
    const auto xs = centre_span((in.cx - in.w / 2) * width, (in.cx + in.w / 2) * width, width);
    const auto ys = centre_span((in.cy - in.h / 2) * height, (in.cy + in.h / 2) * height, height);
    const int bw = xs.hi - xs.lo;
    const int bh = ys.hi - ys.lo;
    BBox out = in;
    if (bw > 0 && bh > 0) {
      std::vector<char> covered(static_cast<std::size_t>(bw) * bh, 0);
      for (const Rect& r : rects) {
        const int x0 = std::max(r.x, xs.lo);
        const int x1 = std::min(r.x + r.w, xs.hi);
        const int y0 = std::max(r.y, ys.lo);
        const int y1 = std::min(r.y + r.h, ys.hi);
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x)
            covered[static_cast<std::size_t>(y - ys.lo) * bw + (x - xs.lo)] = 1;
      }
      const auto hit = std::count(covered.begin(), covered.end(), 1);
      const double frac = static_cast<double>(hit) / (static_cast<double>(bw) * bh);
      out.visibility = in.visibility * (1.0 - frac);
    }
    res.record.visibility_deltas.push_back(in.visibility - out.visibility);
    if (out.visibility >= cfg.drop_visibility_below) res.annotations.boxes.push_back(out);
  }
  return res;
}

}  // namespace aquaaug
