#pragma once

#include <filesystem>

#include "plantdoctor/image.hpp"

namespace plantdoctor {

// Thin wrappers over the OpenCV codecs; rasters stay in RGB order on our side.

/// Throws MediaError when the file cannot be decoded.
[[nodiscard]] Image read_image(const std::filesystem::path& path);
/// Non-zero pixels of the first channel become set bits.
[[nodiscard]] BinaryMask read_mask(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const Image& img);
/// Set bits are written as 255, clear bits as 0.
void write_png(const std::filesystem::path& path, const BinaryMask& mask);

[[nodiscard]] bool is_image_file(const std::filesystem::path& path);

}  // namespace plantdoctor
