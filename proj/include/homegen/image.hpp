#pragma once

// PNG image I/O. Encoder settings are pinned (fixed compression level, no
// filtering heuristics) so identical pixels always produce identical bytes.

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "homegen/error.hpp"
#include "homegen/fsutil.hpp"

namespace homegen {

/// 8-bit RGB image, row-major from the top-left.
struct RgbImage {
  int width = 0, height = 0;
  std::vector<std::uint8_t> pixels;  // 3 bytes per pixel

  static RgbImage filled(int w, int h, std::uint8_t r, std::uint8_t g,
                         std::uint8_t b) {
    RgbImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
      img.pixels[i] = r;
      img.pixels[i + 1] = g;
      img.pixels[i + 2] = b;
    }
    return img;
  }

  void at(int x, int y, std::uint8_t& r, std::uint8_t& g,
          std::uint8_t& b) const {
    std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    r = pixels[i];
    g = pixels[i + 1];
    b = pixels[i + 2];
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
  }
};

/// 16-bit single-channel image, row-major from the top-left.
struct Gray16Image {
  int width = 0, height = 0;
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint16_t v) {
    pixels[static_cast<std::size_t>(y) * width + x] = v;
  }
};

namespace detail_png {

struct FileCloser {
  std::FILE* f = nullptr;
  ~FileCloser() {
    if (f) std::fclose(f);
  }
};

inline void configure_deterministic(png_structp png) {
  png_set_compression_level(png, 6);
  png_set_filter(png, 0, PNG_FILTER_NONE);
}

/// Closes the stream and renames the finished temp file over the target.
inline void finish_atomic(FileCloser& fc, const std::string& tmp,
                          const std::string& path) {
  std::fclose(fc.f);
  fc.f = nullptr;
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace detail_png

inline void write_png_rgb(const std::string& path, const RgbImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() !=
          static_cast<std::size_t>(img.width) * img.height * 3)
    throw ValidationError("malformed RGB image");
  const std::string tmp = path + ".tmp";
  detail_png::FileCloser fc{std::fopen(tmp.c_str(), "wb")};
  if (!fc.f) throw IoError("cannot open '" + tmp + "' for writing");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed for '" + path + "'");
  }
  png_init_io(png, fc.f);
  detail_png::configure_deterministic(png);
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(
                           &img.pixels[static_cast<std::size_t>(y) *
                                       img.width * 3]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  detail_png::finish_atomic(fc, tmp, path);
}

inline void write_png_gray16(const std::string& path, const Gray16Image& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw ValidationError("malformed 16-bit image");
  const std::string tmp = path + ".tmp";
  detail_png::FileCloser fc{std::fopen(tmp.c_str(), "wb")};
  if (!fc.f) throw IoError("cannot open '" + tmp + "' for writing");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed for '" + path + "'");
  }
  png_init_io(png, fc.f);
  detail_png::configure_deterministic(png);
  png_set_IHDR(png, info, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 2);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::uint16_t v = img.at(x, y);  // big-endian per PNG spec
      row[2 * x] = static_cast<std::uint8_t>(v >> 8);
      row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  detail_png::finish_atomic(fc, tmp, path);
}

inline RgbImage read_png_rgb(const std::string& path) {
  detail_png::FileCloser fc{std::fopen(path.c_str(), "rb")};
  if (!fc.f) throw IoError("cannot open '" + path + "'");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG read failed for '" + path + "'");
  }
  png_init_io(png, fc.f);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  RgbImage img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) !=
      static_cast<std::size_t>(img.width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unexpected row layout in '" + path + "'");
  }
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  for (int y = 0; y < img.height; ++y)
    png_read_row(png, &img.pixels[static_cast<std::size_t>(y) * img.width * 3],
                 nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

inline Gray16Image read_png_gray16(const std::string& path) {
  detail_png::FileCloser fc{std::fopen(path.c_str(), "rb")};
  if (!fc.f) throw IoError("cannot open '" + path + "'");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG read failed for '" + path + "'");
  }
  png_init_io(png, fc.f);
  png_read_info(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY ||
      png_get_bit_depth(png, info) != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("'" + path + "' is not a 16-bit grayscale PNG");
  }
  Gray16Image img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 2);
  for (int y = 0; y < img.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < img.width; ++x)
      img.set(x, y, static_cast<std::uint16_t>((row[2 * x] << 8) |
                                               row[2 * x + 1]));
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace homegen
