#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace speclearn {

/// 8-bit RGB PNG encode/decode. `rgb` is HxWx3 row-major.
void write_png_rgb8(const std::filesystem::path& path, int height, int width,
                    const std::vector<uint8_t>& rgb);
std::vector<uint8_t> read_png_rgb8(const std::filesystem::path& path, int& height, int& width);

}  // namespace speclearn
