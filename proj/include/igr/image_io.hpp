#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "igr/image.hpp"

namespace igr {

/// 8-bit PNG (gray, RGB or RGBA in; 3-channel [0,1] out).
Image read_png(const std::filesystem::path& path);
Image decode_png(const std::vector<std::uint8_t>& bytes);
/// Quantizes [0,1] values with round-to-nearest after clamping. 1 or 3 channels.
void write_png(const Image& img, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const Image& img);

/// Single-channel little-endian PFM ("Pf", negative scale). Rows are stored bottom-to-top on disk.
DepthMap read_pfm(const std::filesystem::path& path);
void write_pfm(const DepthMap& depth, const std::filesystem::path& path);

/// Round-to-nearest 8-bit quantization, as applied by write_png.
Image quantize8(const Image& img);

}  // namespace igr
