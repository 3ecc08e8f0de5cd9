#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "guidefill/grid.hpp"
#include "guidefill/spline.hpp"

// Hand-rolled generators for the property tests. Every generator is driven
// by an explicit seed so a failure can be replayed from the case index.
namespace guidefill::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline ImageBuffer random_image(Rng& rng, int w, int h, int channels) {
  ImageBuffer img(w, h, channels);
  for (float& v : img.values()) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return img;
}

// Union of random rectangles and disks labelled Inpaint, kept `margin` pixels
// away from the lattice edge.
inline void paint_blobs(Rng& rng, LabelMask& mask, int blobs, int margin, Label label) {
  const int w = mask.width();
  const int h = mask.height();
  if (w <= 2 * margin || h <= 2 * margin) return;
  for (int b = 0; b < blobs; ++b) {
    const int ci = rng.uniform_int(margin, w - 1 - margin);
    const int cj = rng.uniform_int(margin, h - 1 - margin);
    const int ri = rng.uniform_int(0, std::max(0, (w - 2 * margin) / 3));
    const int rj = rng.uniform_int(0, std::max(0, (h - 2 * margin) / 3));
    const bool disk = rng.coin();
    for (int j = std::max(margin, cj - rj); j <= std::min(h - 1 - margin, cj + rj); ++j) {
      for (int i = std::max(margin, ci - ri); i <= std::min(w - 1 - margin, ci + ri); ++i) {
        if (disk && ri > 0 && rj > 0) {
          const double u = static_cast<double>(i - ci) / ri;
          const double v = static_cast<double>(j - cj) / rj;
          if (u * u + v * v > 1.0) continue;
        }
        mask.set(i, j, label);
      }
    }
  }
}

// Inpaint blobs anywhere (touching the edge allowed) plus Bystander islands
// and scattered Bystander pixels.
inline LabelMask random_mask(Rng& rng, int w, int h, bool bystanders = true) {
  LabelMask mask(w, h);
  paint_blobs(rng, mask, rng.uniform_int(1, 4), 0, Label::kInpaint);
  if (bystanders) {
    paint_blobs(rng, mask, rng.uniform_int(0, 3), 0, Label::kBystander);
    const int scatter = rng.uniform_int(0, w * h / 20);
    for (int k = 0; k < scatter; ++k) {
      mask.set(rng.uniform_int(0, w - 1), rng.uniform_int(0, h - 1), Label::kBystander);
    }
  }
  return mask;
}

// Inpaint region strictly inside the lattice with only Readable pixels around
// it (no Bystanders).
inline LabelMask surrounded_mask(Rng& rng, int w, int h) {
  LabelMask mask(w, h);
  paint_blobs(rng, mask, rng.uniform_int(1, 5), 1, Label::kInpaint);
  return mask;
}

inline Spline random_spline(Rng& rng, int index) {
  Spline s;
  s.id = "s" + std::to_string(index);
  s.source = rng.coin() ? SplineSource::kAuto : SplineSource::kUser;
  s.kind = rng.coin() ? SplineKind::kPolyline : SplineKind::kBezier;
  const double angle = rng.uniform(0.0, 6.283185307179586);
  const double len = rng.uniform(0.0, 1.0);
  s.direction = {len * std::cos(angle), len * std::sin(angle)};
  const int count = s.kind == SplineKind::kBezier ? 3 * rng.uniform_int(1, 3) + 1 : rng.uniform_int(2, 6);
  Vec2 p{rng.uniform(-50.0, 300.0), rng.uniform(-50.0, 300.0)};
  for (int k = 0; k < count; ++k) {
    s.points.push_back(p);
    p = p + Vec2{rng.uniform(0.5, 20.0), rng.uniform(-20.0, 20.0)};
  }
  return s;
}

// Independent brute-force oracle for the active boundary.
inline PixelSet brute_active(const LabelMask& mask) {
  PixelSet out;
  for (int j = 0; j < mask.height(); ++j) {
    for (int i = 0; i < mask.width(); ++i) {
      if (mask.at(i, j) != Label::kInpaint) continue;
      bool active = false;
      for (int dj = -1; dj <= 1 && !active; ++dj) {
        for (int di = -1; di <= 1 && !active; ++di) {
          if (di == 0 && dj == 0) continue;
          int ni = i + di;
          const int nj = j + dj;
          if (nj < 0 || nj >= mask.height()) continue;
          if (mask.periodic_x()) {
            ni = (ni % mask.width() + mask.width()) % mask.width();
          } else if (ni < 0 || ni >= mask.width()) {
            continue;
          }
          active = mask.at(ni, nj) == Label::kReadable;
        }
      }
      if (active) out.push_back({i, j});
    }
  }
  return out;
}

}  // namespace guidefill::testing
