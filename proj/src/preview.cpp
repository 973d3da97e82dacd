#include "aquaaug/preview.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

namespace aquaaug {

namespace {

constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;
constexpr int kFontScale = 2;
constexpr int kGap = 4;
constexpr int kMaxColumns = 3;
constexpr std::uint8_t kBackground = 32;

using Glyph = std::array<std::uint8_t, kGlyphH>;

// Rows top to bottom, bit 4 is the leftmost column.
Glyph glyph(char ch) {
  switch (std::toupper(static_cast<unsigned char>(ch))) {
    case 'A': return {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11};
    case 'B': return {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E};
    case 'C': return {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E};
    case 'D': return {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E};
    case 'E': return {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F};
    case 'F': return {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10};
    case 'G': return {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F};
    case 'H': return {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11};
    case 'I': return {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E};
    case 'J': return {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C};
    case 'K': return {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11};
    case 'L': return {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F};
    case 'M': return {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11};
    case 'N': return {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11};
    case 'O': return {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E};
    case 'P': return {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10};
    case 'Q': return {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D};
    case 'R': return {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11};
    case 'S': return {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E};
    case 'T': return {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04};
    case 'U': return {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E};
    case 'V': return {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04};
    case 'W': return {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A};
    case 'X': return {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11};
    case 'Y': return {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04};
    case 'Z': return {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F};
    case '0': return {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E};
    case '1': return {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E};
    case '2': return {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F};
    case '3': return {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E};
    case '4': return {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02};
    case '5': return {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E};
    case '6': return {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E};
    case '7': return {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08};
    case '8': return {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E};
    case '9': return {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C};
    case '+': return {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00};
    case '-': return {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00};
    default: return {};
  }
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

void draw_text(ImageBuffer& canvas, int x0, int y0, const std::string& text, int scale,
               std::uint8_t value) {
  auto px = canvas.u8();
  const int pitch = (kGlyphW + 1) * scale;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const Glyph g = glyph(text[i]);
    const int gx = x0 + static_cast<int>(i) * pitch;
    for (int r = 0; r < kGlyphH; ++r)
      for (int col = 0; col < kGlyphW; ++col) {
        if (!((g[r] >> (kGlyphW - 1 - col)) & 1)) continue;
        for (int dy = 0; dy < scale; ++dy)
          for (int dx = 0; dx < scale; ++dx) {
            const int x = gx + col * scale + dx;
            const int y = y0 + r * scale + dy;
            if (x < 0 || y < 0 || x >= canvas.width() || y >= canvas.height()) continue;
            for (int c = 0; c < canvas.channels(); ++c) px[canvas.index(x, y, c)] = value;
          }
      }
  }
}

std::vector<PreviewPanel> preview_panels(const PipelineContext& ctx, const Sample& input,
                                         const PreviewOptions& opts) {
  std::vector<PreviewPanel> panels;
  panels.push_back({"ORIGINAL", input.image.depth() == Depth::U8 ? input.image : to_u8(input.image)});
  Sample cur = input;
  for (StageKind kind : ctx.config().order) {
    if (!ctx.config().enabled(kind)) continue;
    auto [next, record] = run_stage(ctx, kind, opts.independent ? input : cur, {.force = true});
    const std::string name = upper(to_string(kind));
    panels.push_back({opts.independent ? name : "+" + name, to_u8(next.image)});
    if (!opts.independent) cur = std::move(next);
  }
  return panels;
}

ImageBuffer compose_grid(const std::vector<PreviewPanel>& panels) {
  if (panels.empty()) return {};
  if (panels.size() == 1) return panels.front().image;

  int cell_w = 0, img_h = 0, channels = 3;
  for (const auto& p : panels) {
    cell_w = std::max(cell_w, p.image.width());
    img_h = std::max(img_h, p.image.height());
    channels = std::max(channels, p.image.channels());
  }
  const int strip = kGlyphH * kFontScale + 2 * kGap;
  const int cell_h = strip + img_h;
  const int n = static_cast<int>(panels.size());
  const int cols = std::min(n, kMaxColumns);
  const int rows = (n + cols - 1) / cols;
  const int width = cols * cell_w + (cols + 1) * kGap;
  const int height = rows * cell_h + (rows + 1) * kGap;

  std::vector<std::uint8_t> bg(static_cast<std::size_t>(width) * height * channels, kBackground);
  ImageBuffer canvas(width, height, channels, std::move(bg));
  auto dst = canvas.u8();
  for (int i = 0; i < n; ++i) {
    const int ox = kGap + (i % cols) * (cell_w + kGap);
    const int oy = kGap + (i / cols) * (cell_h + kGap);
    draw_text(canvas, ox, oy + kGap, panels[i].label, kFontScale, 255);
    const ImageBuffer& im = panels[i].image;
    const auto src = im.u8();
    for (int y = 0; y < im.height(); ++y)
      for (int x = 0; x < im.width(); ++x)
        for (int c = 0; c < channels; ++c) {
          const int sc = im.channels() == 1 ? 0 : c;
          dst[canvas.index(ox + x, oy + strip + y, c)] = src[im.index(x, y, sc)];
        }
  }
  return canvas;
}

}  // namespace aquaaug
