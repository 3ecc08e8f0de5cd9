#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "guidefill/grid.hpp"

namespace guidefill {

// 8-bit <-> unit-range conversion, rounding half away from zero.
std::uint8_t to_byte(float value);
inline float from_byte(std::uint8_t b) { return static_cast<float>(b) / 255.0f; }

// PNG (gray, gray+alpha, RGB, RGBA; 8 or 16 bit are reduced to 8 bit).
ImageBuffer read_png(const std::filesystem::path& path);
ImageBuffer decode_png(const std::vector<std::uint8_t>& bytes);
void write_png(const std::filesystem::path& path, const ImageBuffer& image);
std::vector<std::uint8_t> encode_png(const ImageBuffer& image);

// Binary PGM label masks: 0 = Readable, 128 = Bystander, 255 = Inpaint.
LabelMask read_mask_pgm(const std::filesystem::path& path);
LabelMask decode_mask_pgm(const std::vector<std::uint8_t>& bytes);
void write_mask_pgm(const std::filesystem::path& path, const LabelMask& mask);
std::vector<std::uint8_t> encode_mask_pgm(const LabelMask& mask);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

// FNV-1a over the raw float payload plus dimensions.
std::uint64_t content_hash(const ImageBuffer& image);
std::string hex64(std::uint64_t value);

}  // namespace guidefill
