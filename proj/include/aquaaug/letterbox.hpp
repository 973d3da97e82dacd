#pragma once

#include <string>
#include <vector>

#include "aquaaug/image.hpp"

namespace aquaaug {

/// Placement of the scaled content inside the square canvas.
struct LetterboxGeometry {
  int target = 0;
  int content_width = 0;
  int content_height = 0;
  int pad_left = 0;
  int pad_top = 0;
  int pad_right = 0;
  int pad_bottom = 0;
};

/// Longest side scales to `target`; odd padding remainders go bottom/right.
LetterboxGeometry letterbox_geometry(int width, int height, int target);

struct LetterboxResult {
  ImageBuffer image;
  AnnotationSet annotations;
  LetterboxGeometry geometry;
  std::vector<std::string> warnings;  // one per dropped (degenerate) box
};

/// Bilinear resize of the longest side to `target` and symmetric zero padding.
/// Boxes are mapped into the padded frame; boxes that collapse to zero area are
/// dropped and reported in `warnings`. Works on both U8 and F32 images.
LetterboxResult letterbox_resize(const ImageBuffer& img, const AnnotationSet& ann, int target);

/// Bilinear resample with half-pixel centers (no padding).
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_width, int out_height);

}  // namespace aquaaug
