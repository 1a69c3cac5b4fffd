#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "styler/image.hpp"
#include "styler/rng.hpp"

namespace styler {

// Procedural 32x32 dataset: one hard-edged shape on a flat background.
// All colors come from Rng::uniform(), i.e. the 2^-24 grid, so every sample
// survives the latent codec bit-exactly.
struct DatasetConfig {
  std::vector<std::string> shapes{"circle", "square", "triangle"};
  float background_min = 0.05f;
  float background_max = 0.95f;
  float foreground_min = 0.05f;
  float foreground_max = 0.95f;
  int sample_count = 256;
  uint64_t seed = 0;
  std::string style_transform;  // empty, "stripe", "invert" or "saturate"

  void validate() const;
};

struct DatasetSample {
  ToyImage image;
  std::string shape;  // prompt word
};

// Draws one sample; consumes a fixed number of RNG values regardless of shape.
DatasetSample sample_shape_image(const DatasetConfig& cfg, Rng& rng);

// Deterministic pixel transforms used to synthesize single style references.
// "stripe" halves every other 2-row band, "invert" flips the palette,
// "saturate" pushes channels away from the per-pixel gray level.
ToyImage apply_style_transform(const std::string& name, const ToyImage& img);

bool is_known_style_transform(const std::string& name);

// The held-out sample a style reference is derived from: one extra draw from
// a dedicated substream of the dataset seed, then the style transform.
DatasetSample make_style_reference(const DatasetConfig& cfg);

}  // namespace styler
