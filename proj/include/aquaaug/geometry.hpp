#pragma once

#include <utility>

#include "aquaaug/image.hpp"

namespace aquaaug {

struct FlipConfig {
  double probability = 0.5;
};

/// Mirror across the vertical axis: column j -> width-1-j, cx -> 1-cx.
/// Rows (the dorsal-ventral axis) are never reordered.
std::pair<ImageBuffer, AnnotationSet> hflip(const ImageBuffer& img, const AnnotationSet& ann);

}  // namespace aquaaug
