#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "aquaaug/image.hpp"

namespace aquaaug {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view bytes);

/// Checksum of an output sample as it is written to disk: the 8-bit pixels
/// (F32 images are quantized exactly like the PNG writer does) plus the label
/// file text. Loading the written files and hashing them again gives the same value.
std::string sample_checksum(const ImageBuffer& img, const AnnotationSet& ann);

}  // namespace aquaaug
