#include "styler/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace styler {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

// Decodes any PNG to 8-bit RGB rows.
void read_png_rgb8(const std::string& path, int& width, int& height,
                   std::vector<uint8_t>& rgb) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  require(f != nullptr, ErrorKind::kIo, "cannot open PNG: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, ErrorKind::kIo, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::kIo, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::kIo, "corrupt PNG: " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  width = int(png_get_image_width(png, info));
  height = int(png_get_image_height(png, info));
  png_byte color_type = png_get_color_type(png, info);
  png_byte bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  rgb.assign(size_t(width) * size_t(height) * 3, 0);
  std::vector<png_bytep> rows(size_t(height));
  for (int y = 0; y < height; ++y) rows[size_t(y)] = rgb.data() + size_t(y) * size_t(width) * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
}

void write_png_8(const std::string& path, int width, int height, int channels,
                 const uint8_t* data) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  require(f != nullptr, ErrorKind::kIo, "cannot write PNG: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, ErrorKind::kIo, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::kIo, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::kIo, "PNG write failed: " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(size_t(height));
  for (int y = 0; y < height; ++y) {
    rows[size_t(y)] =
        const_cast<png_bytep>(data + size_t(y) * size_t(width) * size_t(channels));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

ToyImage read_image_png(const std::string& path) {
  int w = 0, h = 0;
  std::vector<uint8_t> rgb;
  read_png_rgb8(path, w, h, rgb);
  require(w == kImageSize && h == kImageSize, ErrorKind::kConfig,
          "content/style images must be 32x32: " + path);
  ToyImage img;
  for (int y = 0; y < kImageSize; ++y) {
    for (int x = 0; x < kImageSize; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.pixels.at(y, x, c) =
            float(rgb[(size_t(y) * kImageSize + size_t(x)) * 3 + size_t(c)]) / 255.0f;
      }
    }
  }
  return img;
}

void write_image_png(const std::string& path, const ToyImage& img) {
  std::vector<uint8_t> rgb(size_t(kImageSize) * kImageSize * 3);
  for (int y = 0; y < kImageSize; ++y) {
    for (int x = 0; x < kImageSize; ++x) {
      for (int c = 0; c < 3; ++c) {
        float v = std::clamp(img.pixels.at(y, x, c), 0.0f, 1.0f);
        rgb[(size_t(y) * kImageSize + size_t(x)) * 3 + size_t(c)] =
            uint8_t(std::lround(255.0f * v));
      }
    }
  }
  write_png_8(path, kImageSize, kImageSize, 3, rgb.data());
}

Tensor read_mask_png(const std::string& path) {
  int w = 0, h = 0;
  std::vector<uint8_t> rgb;
  read_png_rgb8(path, w, h, rgb);
  require(w == kImageSize && h == kImageSize, ErrorKind::kConfig,
          "masks must be 32x32: " + path);
  Tensor mask({kImageSize, kImageSize});
  for (int y = 0; y < kImageSize; ++y) {
    for (int x = 0; x < kImageSize; ++x) {
      // channels are equal for true grayscale input; use red
      uint8_t v = rgb[(size_t(y) * kImageSize + size_t(x)) * 3];
      mask.at(y, x) = v >= 128 ? 1.0f : 0.0f;
    }
  }
  return mask;
}

void write_gray_png(const std::string& path, const Tensor& gray) {
  require(gray.rank() == 2, ErrorKind::kShape, "write_gray_png expects a 2-D tensor");
  int h = gray.shape[0], w = gray.shape[1];
  std::vector<uint8_t> bytes(size_t(h) * size_t(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float v = std::clamp(gray.at(y, x), 0.0f, 1.0f);
      bytes[size_t(y) * size_t(w) + size_t(x)] = uint8_t(std::lround(255.0f * v));
    }
  }
  write_png_8(path, w, h, 1, bytes.data());
}

}  // namespace styler
