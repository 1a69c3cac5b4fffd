#pragma once

#include "styler/tensor.hpp"

namespace styler {

inline constexpr int kImageSize = 32;
inline constexpr int kImageChannels = 3;
inline constexpr int kLatentSize = 16;
inline constexpr int kLatentChannels = 12;

// 32x32 RGB image with float pixels in [0,1].
struct ToyImage {
  Tensor pixels;  // (32, 32, 3)

  ToyImage() : pixels(Tensor::zeros({kImageSize, kImageSize, kImageChannels})) {}
  explicit ToyImage(Tensor p);

  void validate() const;
};

// Analytic codec: affine map x -> 2x-1 followed by space-to-depth with
// factor 2. Latent channel layout: (dy*2 + dx)*3 + c for the pixel at
// (2y+dy, 2x+dx) channel c. Works for any even-sized (H,W,3) tensor; the
// 32x32 image maps to the 16x16x12 latent.
Tensor space_to_depth_encode(const Tensor& pixels);
Tensor depth_to_space_decode(const Tensor& latent, bool clamp_unit);

Tensor encode_image(const ToyImage& img);
// Exact inverse of encode_image; clamps to [0,1] since generated latents can
// land slightly outside the affine range.
ToyImage decode_latent(const Tensor& latent);

}  // namespace styler
