#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aquaaug/image.hpp"
#include "aquaaug/rng.hpp"

namespace aquaaug {

enum class EraseFill { UniformNoise, ChannelMean };

const char* to_string(EraseFill f);
EraseFill parse_erase_fill(const std::string& s);

struct EraseConfig {
  double probability = 0.5;
  int max_occluders = 3;
  double fractal_dim = 1.7;  // area tail exponent is fractal_dim / 2
  double area_min = 0.02;
  double area_max = 0.20;
  double tau = 0.0;  // cross-derivative gate; 0 disables it
  EraseFill fill = EraseFill::UniformNoise;
  double drop_visibility_below = 0.2;

  void validate() const;
};

/// Pixel rectangle, top-left corner plus extent.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const Rect&) const = default;
};

struct EraseRecord {
  std::vector<Rect> rects;
  std::uint64_t fill_seed = 0;
  /// Visibility lost by each input box, in input order (dropped boxes included).
  std::vector<double> visibility_deltas;
};

struct EraseResult {
  ImageBuffer image;
  AnnotationSet annotations;
  EraseRecord record;
};

/// Inverse-CDF draw from the truncated Pareto density a^-(alpha+1) on [lo, hi].
double sample_truncated_pareto(double lo, double hi, double alpha, Stream& rng);

/// One rectangle: Pareto area fraction, aspect in [0.5, 2], uniform position
/// with full containment.
Rect draw_occluder(const EraseConfig& cfg, int width, int height, Stream& rng);

/// With probability cfg.probability, k ~ U{1..max_occluders} rectangles; else none.
std::vector<Rect> sample_occluders(const EraseConfig& cfg, int width, int height, Stream& rng);

/// Mean |d2L/dxdy| of luma inside the rectangle (0 for rects narrower than 2 px).
double mean_cross_derivative(const ImageBuffer& img, const Rect& r);

/// Sample occluders (gated by tau when tau > 0), fill them and update visibility.
EraseResult apply_erase(const ImageBuffer& img, const AnnotationSet& ann, const EraseConfig& cfg,
                        Stream& rng);

/// Deterministic part of apply_erase: fill the given rects and update boxes.
EraseResult erase_rects(const ImageBuffer& img, const AnnotationSet& ann, const EraseConfig& cfg,
                        const std::vector<Rect>& rects, std::uint64_t fill_seed);

/// Number of box pixels (pixel centres inside the box) on a width x height frame.
std::int64_t box_pixel_count(const BBox& box, int width, int height);

}  // namespace aquaaug
