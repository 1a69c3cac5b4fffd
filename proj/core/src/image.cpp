#include "styler/image.hpp"

#include <algorithm>

namespace styler {

ToyImage::ToyImage(Tensor p) : pixels(std::move(p)) { validate(); }

void ToyImage::validate() const {
  require(pixels.shape == std::vector<int>({kImageSize, kImageSize, kImageChannels}),
          ErrorKind::kShape, "ToyImage must be 32x32x3");
  for (float v : pixels.data) {
    require(std::isfinite(v) && v >= 0.0f && v <= 1.0f, ErrorKind::kShape,
            "ToyImage pixel out of [0,1]");
  }
}

Tensor space_to_depth_encode(const Tensor& pixels) {
  require(pixels.rank() == 3 && pixels.shape[2] == kImageChannels && pixels.shape[0] % 2 == 0 &&
              pixels.shape[1] % 2 == 0,
          ErrorKind::kShape, "encode expects an even-sized (H,W,3) tensor");
  int lh = pixels.shape[0] / 2;
  int lw = pixels.shape[1] / 2;
  Tensor z({lh, lw, kLatentChannels});
  for (int y = 0; y < lh; ++y) {
    for (int x = 0; x < lw; ++x) {
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          for (int c = 0; c < kImageChannels; ++c) {
            float p = pixels.at(2 * y + dy, 2 * x + dx, c);
            z.at(y, x, (dy * 2 + dx) * kImageChannels + c) = 2.0f * p - 1.0f;
          }
        }
      }
    }
  }
  return z;
}

Tensor depth_to_space_decode(const Tensor& latent, bool clamp_unit) {
  require(latent.rank() == 3 && latent.shape[2] == kLatentChannels, ErrorKind::kShape,
          "decode expects an (h,w,12) latent");
  int h = latent.shape[0] * 2;
  int w = latent.shape[1] * 2;
  Tensor p({h, w, kImageChannels});
  for (int y = 0; y < latent.shape[0]; ++y) {
    for (int x = 0; x < latent.shape[1]; ++x) {
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          for (int c = 0; c < kImageChannels; ++c) {
            float v = latent.at(y, x, (dy * 2 + dx) * kImageChannels + c);
            float px = (v + 1.0f) / 2.0f;
            if (clamp_unit) px = std::clamp(px, 0.0f, 1.0f);
            p.at(2 * y + dy, 2 * x + dx, c) = px;
          }
        }
      }
    }
  }
  return p;
}

Tensor encode_image(const ToyImage& img) {
  img.validate();
  return space_to_depth_encode(img.pixels);
}

ToyImage decode_latent(const Tensor& latent) {
  require(latent.shape == std::vector<int>({kLatentSize, kLatentSize, kLatentChannels}),
          ErrorKind::kShape, "decode_latent expects a 16x16x12 latent");
  ToyImage img;
  img.pixels = depth_to_space_decode(latent, /*clamp_unit=*/true);
  return img;
}

}  // namespace styler
