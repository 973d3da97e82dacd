#pragma once

#include <filesystem>

#include "aquaaug/image.hpp"

namespace aquaaug {

/// Decode a PNG or JPEG file (sniffed by magic bytes) into an 8-bit RGB image.
/// Grey, palette, alpha and 16-bit PNGs are converted. Throws UnreadableImage.
ImageBuffer read_image(const std::filesystem::path& path);

/// Write an 8-bit PNG (1 or 3 channels). F32 images are quantized with to_u8().
/// Throws IoFailure.
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

}  // namespace aquaaug
