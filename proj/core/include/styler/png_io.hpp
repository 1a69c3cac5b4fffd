#pragma once

#include <string>

#include "styler/image.hpp"

namespace styler {

// 8-bit RGB PNG in, float image out; pixel -> real conversion is value/255.
ToyImage read_image_png(const std::string& path);

// Quantizes with round(255*v) after clamping to [0,1].
void write_image_png(const std::string& path, const ToyImage& img);

// 8-bit grayscale mask; returns a (32,32) tensor of {0,1} after thresholding
// at 128 (>= 128 -> 1).
Tensor read_mask_png(const std::string& path);

// Grayscale output used for PCA component grids; values clamped to [0,1].
void write_gray_png(const std::string& path, const Tensor& gray);

}  // namespace styler
