#include "styler/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace styler {

void DatasetConfig::validate() const {
  require(!shapes.empty(), ErrorKind::kConfig, "dataset: shape set must not be empty");
  for (const auto& s : shapes) {
    require(s == "circle" || s == "square" || s == "triangle", ErrorKind::kConfig,
            "dataset: unknown shape '" + s + "'");
  }
  require(background_min >= 0.0f && background_max <= 1.0f && background_min <= background_max,
          ErrorKind::kConfig, "dataset: bad background color range");
  require(foreground_min >= 0.0f && foreground_max <= 1.0f && foreground_min <= foreground_max,
          ErrorKind::kConfig, "dataset: bad foreground color range");
  require(sample_count >= 1, ErrorKind::kConfig, "dataset: sample_count must be >= 1");
  if (!style_transform.empty()) {
    require(is_known_style_transform(style_transform), ErrorKind::kConfig,
            "dataset: unknown style transform '" + style_transform + "'");
  }
}

namespace {

bool inside_shape(const std::string& shape, float px, float py, float cx, float cy, float r) {
  float dx = px - cx;
  float dy = py - cy;
  if (shape == "circle") return dx * dx + dy * dy <= r * r;
  if (shape == "square") return std::max(std::abs(dx), std::abs(dy)) <= r;
  // upright isoceles triangle: apex (cx, cy-r), base corners (cx -/+ r, cy+r)
  if (py < cy - r || py > cy + r) return false;
  float half_width = (py - (cy - r)) / 2.0f;
  return std::abs(dx) <= half_width;
}

}  // namespace

DatasetSample sample_shape_image(const DatasetConfig& cfg, Rng& rng) {
  cfg.validate();
  DatasetSample out;
  out.shape = cfg.shapes[size_t(rng.uniform_int(cfg.shapes.size()))];

  float bg[3], fg[3];
  for (int c = 0; c < 3; ++c) bg[c] = rng.uniform(cfg.background_min, cfg.background_max);
  for (int c = 0; c < 3; ++c) fg[c] = rng.uniform(cfg.foreground_min, cfg.foreground_max);
  float cx = rng.uniform(8.0f, 24.0f);
  float cy = rng.uniform(8.0f, 24.0f);
  float r = rng.uniform(4.0f, 11.0f);

  for (int y = 0; y < kImageSize; ++y) {
    for (int x = 0; x < kImageSize; ++x) {
      bool in = inside_shape(out.shape, float(x) + 0.5f, float(y) + 0.5f, cx, cy, r);
      for (int c = 0; c < 3; ++c) out.image.pixels.at(y, x, c) = in ? fg[c] : bg[c];
    }
  }
  return out;
}

bool is_known_style_transform(const std::string& name) {
  return name == "stripe" || name == "invert" || name == "saturate";
}

ToyImage apply_style_transform(const std::string& name, const ToyImage& img) {
  require(is_known_style_transform(name), ErrorKind::kConfig,
          "unknown style transform '" + name + "'");
  ToyImage out = img;
  if (name == "stripe") {
    for (int y = 0; y < kImageSize; ++y) {
      if ((y / 2) % 2 == 0) continue;
      for (int x = 0; x < kImageSize; ++x) {
        for (int c = 0; c < 3; ++c) out.pixels.at(y, x, c) *= 0.5f;
      }
    }
  } else if (name == "invert") {
    for (auto& v : out.pixels.data) v = 1.0f - v;
  } else {  // saturate
    for (int y = 0; y < kImageSize; ++y) {
      for (int x = 0; x < kImageSize; ++x) {
        float gray = (out.pixels.at(y, x, 0) + out.pixels.at(y, x, 1) + out.pixels.at(y, x, 2)) / 3.0f;
        for (int c = 0; c < 3; ++c) {
          float v = gray + 1.8f * (out.pixels.at(y, x, c) - gray);
          out.pixels.at(y, x, c) = std::clamp(v, 0.0f, 1.0f);
        }
      }
    }
  }
  return out;
}

DatasetSample make_style_reference(const DatasetConfig& cfg) {
  cfg.validate();
  require(!cfg.style_transform.empty(), ErrorKind::kConfig,
          "style reference requires a style transform");
  Rng rng = Rng::substream(cfg.seed, "dataset.heldout");
  DatasetSample s = sample_shape_image(cfg, rng);
  s.image = apply_style_transform(cfg.style_transform, s.image);
  return s;
}

}  // namespace styler
