#include "guidefill/grid.hpp"

#include <algorithm>

namespace guidefill {

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
  if (channels < 1 || channels > kMaxChannels) {
    throw Error(ErrorCode::kInvalidArgument, "image must have 1-4 channels");
  }
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                     static_cast<std::size_t>(channels),
                 fill);
}

Color ImageBuffer::color(int i, int j) const {
  Color out;
  out.channels = channels_;
  for (int c = 0; c < channels_; ++c) out[c] = at(i, j, c);
  return out;
}

void ImageBuffer::set_color(int i, int j, const Color& color) {
  for (int c = 0; c < channels_; ++c) at(i, j, c) = static_cast<float>(color[c]);
}

LabelMask::LabelMask(int width, int height, Label fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
  }
  labels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

std::size_t LabelMask::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

void check_same_size(const ImageBuffer& image, const LabelMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask is " + std::to_string(mask.width()) + "x" +
                    std::to_string(mask.height()) + " but image is " +
                    std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
}

namespace {

template <typename Pred>
bool any_neighbor(const LabelMask& mask, int i, int j, Pred pred) {
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      int ni = i + di;
      const int nj = j + dj;
      if (!mask.resolve(ni, nj)) continue;
      if (pred(mask.at(ni, nj))) return true;
    }
  }
  return false;
}

}  // namespace

PixelSet inner_boundary(const LabelMask& mask, Label target) {
  PixelSet out;
  for (int j = 0; j < mask.height(); ++j) {
    for (int i = 0; i < mask.width(); ++i) {
      if (mask.at(i, j) != target) continue;
      if (any_neighbor(mask, i, j, [&](Label l) { return l != target; })) {
        out.push_back({i, j});
      }
    }
  }
  return out;
}

PixelSet outer_boundary(const LabelMask& mask, Label target) {
  PixelSet out;
  for (int j = 0; j < mask.height(); ++j) {
    for (int i = 0; i < mask.width(); ++i) {
      if (mask.at(i, j) == target) continue;
      if (any_neighbor(mask, i, j, [&](Label l) { return l == target; })) {
        out.push_back({i, j});
      }
    }
  }
  return out;
}

bool is_active(const LabelMask& mask, int i, int j) {
  if (mask.at(i, j) != Label::kInpaint) return false;
  return any_neighbor(mask, i, j, [](Label l) { return l == Label::kReadable; });
}

PixelSet active_boundary(const LabelMask& mask) {
  // A Readable neighbor differs from Inpaint, so every such pixel is also on
  // the inner boundary.
  PixelSet out;
  for (int j = 0; j < mask.height(); ++j) {
    for (int i = 0; i < mask.width(); ++i) {
      if (is_active(mask, i, j)) out.push_back({i, j});
    }
  }
  return out;
}

namespace {

// Splits x into an integer cell and a fractional part in [0, 1), snapping
// fractions within kLatticeSnap of an integer.
inline void split_coordinate(double x, int& cell, double& frac) {
  const double f = std::floor(x);
  frac = x - f;
  cell = static_cast<int>(f);
  if (frac < kLatticeSnap) {
    frac = 0.0;
  } else if (frac > 1.0 - kLatticeSnap) {
    frac = 0.0;
    cell += 1;
  }
}

}  // namespace

bool bilinear_stencil(const LabelMask& mask, GhostPoint p, BilinearStencil& out) {
  int i0 = 0;
  int j0 = 0;
  double fx = 0.0;
  double fy = 0.0;
  split_coordinate(p.x, i0, fx);
  split_coordinate(p.y, j0, fy);

  out.size = 0;
  const double wx[2] = {1.0 - fx, fx};
  const double wy[2] = {1.0 - fy, fy};
  for (int b = 0; b < 2; ++b) {
    if (wy[b] == 0.0) continue;
    for (int a = 0; a < 2; ++a) {
      if (wx[a] == 0.0) continue;
      int i = i0 + a;
      const int j = j0 + b;
      if (!mask.resolve(i, j)) return false;
      const auto k = static_cast<std::size_t>(out.size++);
      out.i[k] = i;
      out.j[k] = j;
      out.w[k] = wx[a] * wy[b];
    }
  }
  return true;
}

std::optional<Color> sample_bilinear(const ImageBuffer& image, const LabelMask& mask,
                                     GhostPoint p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw Error(ErrorCode::kInvalidArgument, "ghost point must be finite");
  }
  BilinearStencil st;
  if (!bilinear_stencil(mask, p, st)) return std::nullopt;
  for (int k = 0; k < st.size; ++k) {
    if (!mask.readable(st.i[static_cast<std::size_t>(k)], st.j[static_cast<std::size_t>(k)])) {
      return std::nullopt;
    }
  }
  Color out;
  out.channels = image.channels();
  if (st.size == 1) {
    return image.color(st.i[0], st.j[0]);
  }
  for (int k = 0; k < st.size; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    for (int c = 0; c < image.channels(); ++c) {
      out[c] += st.w[kk] * image.at(st.i[kk], st.j[kk], c);
    }
  }
  return out;
}

std::vector<Vec2> ball_offsets(int r) {
  if (r < 1) throw Error(ErrorCode::kInvalidArgument, "ball radius must be >= 1");
  std::vector<Vec2> out;
  for (int m = -r; m <= r; ++m) {
    for (int n = -r; n <= r; ++n) {
      if (n * n + m * m <= r * r) out.push_back({static_cast<double>(n), static_cast<double>(m)});
    }
  }
  return out;
}

Rotation rotation_onto(Vec2 g) {
  const double len = norm(g);
  if (len == 0.0) return {};
  const Vec2 u{g.x / len, g.y / len};
  return {u.y, u.x, -u.x, u.y};
}

std::vector<GhostPoint> rotated_ball(GhostPoint center, Vec2 g, int r) {
  const Rotation rot = rotation_onto(g);
  std::vector<GhostPoint> out;
  for (const Vec2& off : ball_offsets(r)) out.push_back(center + rot.apply(off));
  return out;
}

}  // namespace guidefill
