#pragma once

#include <string>
#include <vector>

#include "aquaaug/pipeline.hpp"

namespace aquaaug {

struct PreviewOptions {
  /// Apply each stage to the original instead of to the previous panel.
  bool independent = false;
};

struct PreviewPanel {
  std::string label;
  ImageBuffer image;  // U8
};

/// The original followed by one panel per enabled augmentation stage, in
/// configured order. Every panel stage is forced on; letterbox and normalize
/// are not shown.
std::vector<PreviewPanel> preview_panels(const PipelineContext& ctx, const Sample& input,
                                         const PreviewOptions& opts = {});

/// Lay panels out in rows of up to three with a caption strip above each.
/// A single panel is returned unchanged (no caption).
ImageBuffer compose_grid(const std::vector<PreviewPanel>& panels);

/// Draw `text` (A-Z, 0-9, '+', '-', space) with a 5x7 font scaled by `scale`.
/// Unsupported characters render as blanks.
void draw_text(ImageBuffer& canvas, int x, int y, const std::string& text, int scale,
               std::uint8_t value);

}  // namespace aquaaug
