#include "guidefill/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace guidefill {

std::uint8_t to_byte(float value) {
  double v = static_cast<double>(value) * 255.0;
  v = std::clamp(v, 0.0, 255.0);
  return static_cast<std::uint8_t>(std::round(v));  // std::round is half-away-from-zero
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

ImageBuffer decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kIo, std::string("png decode failed: ") + img.message);
  }
  const bool has_alpha = (img.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  const bool has_color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  int channels = 1;
  if (has_color) {
    img.format = has_alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
    channels = has_alpha ? 4 : 3;
  } else {
    img.format = has_alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY;
    channels = has_alpha ? 2 : 1;
  }
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&img);
    throw Error(ErrorCode::kIo, std::string("png decode failed: ") + img.message);
  }
  ImageBuffer out(static_cast<int>(img.width), static_cast<int>(img.height), channels);
  auto values = out.values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = from_byte(pixels[k]);
  return out;
}

ImageBuffer read_png(const std::filesystem::path& path) {
  return decode_png(read_file_bytes(path));
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& image) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  switch (image.channels()) {
    case 1: img.format = PNG_FORMAT_GRAY; break;
    case 2: img.format = PNG_FORMAT_GA; break;
    case 3: img.format = PNG_FORMAT_RGB; break;
    default: img.format = PNG_FORMAT_RGBA; break;
  }
  std::vector<std::uint8_t> pixels(image.values().size());
  for (std::size_t k = 0; k < pixels.size(); ++k) pixels[k] = to_byte(image.values()[k]);

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("png encode failed: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("png encode failed: ") + img.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  write_file_bytes(path, encode_png(image));
}

namespace {

// Reads the next whitespace-separated header token, skipping # comments.
std::string next_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char ch = static_cast<char>(bytes[pos]);
    if (ch == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    tok.push_back(static_cast<char>(bytes[pos++]));
  }
  return tok;
}

Label label_from_byte(int value) {
  switch (value) {
    case 0: return Label::kReadable;
    case 128: return Label::kBystander;
    case 255: return Label::kInpaint;
    default:
      throw Error(ErrorCode::kIo, "mask value " + std::to_string(value) +
                                      " is not one of 0, 128, 255");
  }
}

std::uint8_t byte_from_label(Label label) {
  switch (label) {
    case Label::kReadable: return 0;
    case Label::kBystander: return 128;
    case Label::kInpaint: return 255;
  }
  return 0;
}

}  // namespace

LabelMask decode_mask_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  if (magic != "P5" && magic != "P2") throw Error(ErrorCode::kIo, "not a PGM mask");
  int width = 0;
  int height = 0;
  int maxval = 0;
  try {
    width = std::stoi(next_token(bytes, pos));
    height = std::stoi(next_token(bytes, pos));
    maxval = std::stoi(next_token(bytes, pos));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kIo, "malformed PGM header");
  }
  if (width < 1 || height < 1 || maxval != 255) {
    throw Error(ErrorCode::kIo, "PGM mask must be 8-bit with positive size");
  }
  LabelMask mask(width, height);
  const auto total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (magic == "P5") {
    ++pos;  // single whitespace after maxval
    if (bytes.size() < pos + total) throw Error(ErrorCode::kIo, "truncated PGM payload");
    for (int j = 0; j < height; ++j) {
      for (int i = 0; i < width; ++i) {
        mask.set(i, j, label_from_byte(bytes[pos++]));
      }
    }
  } else {
    for (int j = 0; j < height; ++j) {
      for (int i = 0; i < width; ++i) {
        const std::string tok = next_token(bytes, pos);
        if (tok.empty()) throw Error(ErrorCode::kIo, "truncated PGM payload");
        mask.set(i, j, label_from_byte(std::stoi(tok)));
      }
    }
  }
  return mask;
}

LabelMask read_mask_pgm(const std::filesystem::path& path) {
  return decode_mask_pgm(read_file_bytes(path));
}

std::vector<std::uint8_t> encode_mask_pgm(const LabelMask& mask) {
  const std::string header =
      "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + mask.labels().size());
  for (Label l : mask.labels()) out.push_back(byte_from_label(l));
  return out;
}

void write_mask_pgm(const std::filesystem::path& path, const LabelMask& mask) {
  write_file_bytes(path, encode_mask_pgm(mask));
}

std::uint64_t content_hash(const ImageBuffer& image) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= p[k];
      h *= 1099511628211ull;
    }
  };
  const int dims[3] = {image.width(), image.height(), image.channels()};
  mix(dims, sizeof(dims));
  mix(image.values().data(), image.values().size() * sizeof(float));
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace guidefill
