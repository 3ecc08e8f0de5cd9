#include "guidefill/guide.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "guidefill/parallel.hpp"

namespace guidefill {

namespace {

std::size_t flat(const LabelMask& m, int i, int j) {
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(m.width()) +
         static_cast<std::size_t>(i);
}

}  // namespace

std::vector<int> chebyshev_distance_to_unreadable(const LabelMask& mask) {
  std::vector<int> dist(static_cast<std::size_t>(mask.width()) * static_cast<std::size_t>(mask.height()), -1);
  std::deque<PixelCoord> queue;
  for (int j = 0; j < mask.height(); ++j) {
    for (int i = 0; i < mask.width(); ++i) {
      if (!mask.readable(i, j)) {
        dist[flat(mask, i, j)] = 0;
        queue.push_back({i, j});
      }
    }
  }
  while (!queue.empty()) {
    const PixelCoord p = queue.front();
    queue.pop_front();
    const int dp = dist[flat(mask, p.i, p.j)];
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        int ni = p.i + di;
        const int nj = p.j + dj;
        if (!mask.resolve(ni, nj)) continue;
        int& dn = dist[flat(mask, ni, nj)];
        if (dn < 0) {
          dn = dp + 1;
          queue.push_back({ni, nj});
        }
      }
    }
  }
  return dist;
}

int ring_distance(double sigma, double rho) { return tensor_reach(sigma, rho) + 1; }

PixelSet compute_ring(const LabelMask& mask, double sigma, double rho) {
  const int d = ring_distance(sigma, rho);
  const std::vector<int> dist = chebyshev_distance_to_unreadable(mask);
  PixelSet ring;
  for (int j = 0; j < mask.height(); ++j) {
    for (int i = 0; i < mask.width(); ++i) {
      if (dist[flat(mask, i, j)] == d) ring.push_back({i, j});
    }
  }
  if (ring.empty()) throw Error(ErrorCode::kEmptyRing, "no readable pixel at ring distance");
  return ring;
}

std::vector<EdgeSeed> detect_edge_seeds(const ImageBuffer& image, const LabelMask& mask,
                                        const PixelSet& ring, const DetectParams& params) {
  check_same_size(image, mask);
  if (ring.empty()) return {};
  if (!(params.sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "canny sigma must be > 0");
  const int w = mask.width();
  const int h = mask.height();
  const std::vector<int> dist = chebyshev_distance_to_unreadable(mask);
  const int d = ring_distance(params.sigma, params.rho);
  const int a = gaussian_half_width(params.sigma) + 1;
  auto in_annulus = [&](int i, int j) {
    const int dd = dist[flat(mask, i, j)];
    return dd >= std::max(1, d - a) && dd <= d + a;
  };

  // Mask-normalized Gaussian smoothing of the luminance, on the annulus
  // dilated by one pixel so centered differences are available.
  const std::vector<double> k = truncated_gaussian(params.sigma);
  const int kh = static_cast<int>(k.size() / 2);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> smooth(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), nan);
  auto luminance = [&](int i, int j) {
    double s = 0.0;
    for (int c = 0; c < image.channels(); ++c) s += image.at(i, j, c);
    return s / image.channels();
  };
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      if (!mask.readable(i, j)) continue;
      bool near = false;
      for (int dj = -1; dj <= 1 && !near; ++dj) {
        for (int di = -1; di <= 1 && !near; ++di) {
          const int ni = i + di;
          const int nj = j + dj;
          if (ni >= 0 && nj >= 0 && ni < w && nj < h && in_annulus(ni, nj)) near = true;
        }
      }
      if (!near) continue;
      double num = 0.0;
      double den = 0.0;
      for (int b = -kh; b <= kh; ++b) {
        const int jj = j + b;
        if (jj < 0 || jj >= h) continue;
        for (int t = -kh; t <= kh; ++t) {
          const int ii = i + t;
          if (ii < 0 || ii >= w || !mask.readable(ii, jj)) continue;
          const double wt = k[static_cast<std::size_t>(t + kh)] * k[static_cast<std::size_t>(b + kh)];
          num += wt * luminance(ii, jj);
          den += wt;
        }
      }
      smooth[flat(mask, i, j)] = num / den;
    }
  }

  // Gradients scaled so a step of contrast c peaks at magnitude c.
  const double scale = params.sigma * std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> mag(smooth.size(), 0.0);
  std::vector<Vec2> grad(smooth.size());
  auto s_at = [&](int i, int j, double fallback) {
    if (i < 0 || j < 0 || i >= w || j >= h) return fallback;
    const double v = smooth[flat(mask, i, j)];
    return std::isnan(v) ? fallback : v;
  };
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      if (!mask.readable(i, j) || !in_annulus(i, j)) continue;
      const double c = smooth[flat(mask, i, j)];
      const double gx = 0.5 * (s_at(i + 1, j, c) - s_at(i - 1, j, c)) * scale;
      const double gy = 0.5 * (s_at(i, j + 1, c) - s_at(i, j - 1, c)) * scale;
      grad[flat(mask, i, j)] = {gx, gy};
      mag[flat(mask, i, j)] = std::hypot(gx, gy);
    }
  }
  auto mag_at = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= w || j >= h) return 0.0;
    return mag[flat(mask, i, j)];
  };

  // Non-maximum suppression along the gradient, quantized to 4 directions.
  // The >= / > split keeps exactly one pixel of a symmetric ridge.
  std::vector<char> thin(smooth.size(), 0);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const double m = mag[flat(mask, i, j)];
      if (m < params.canny_low || m == 0.0) continue;
      const Vec2 g = grad[flat(mask, i, j)];
      double ang = std::atan2(g.y, g.x) * 180.0 / std::numbers::pi;
      if (ang < 0.0) ang += 180.0;
      int di = 1, dj = 0;
      if (ang >= 22.5 && ang < 67.5) {
        di = 1, dj = 1;
      } else if (ang >= 67.5 && ang < 112.5) {
        di = 0, dj = 1;
      } else if (ang >= 112.5 && ang < 157.5) {
        di = -1, dj = 1;
      }
      if (m > mag_at(i - di, j - dj) && m >= mag_at(i + di, j + dj)) thin[flat(mask, i, j)] = 1;
    }
  }

  // Hysteresis within the annulus.
  std::vector<char> edge(smooth.size(), 0);
  std::deque<PixelCoord> queue;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      if (thin[flat(mask, i, j)] && mag[flat(mask, i, j)] >= params.canny_high) {
        edge[flat(mask, i, j)] = 1;
        queue.push_back({i, j});
      }
    }
  }
  while (!queue.empty()) {
    const PixelCoord p = queue.front();
    queue.pop_front();
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int ni = p.i + di;
        const int nj = p.j + dj;
        if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
        const std::size_t q = flat(mask, ni, nj);
        if (edge[q] || !thin[q]) continue;
        edge[q] = 1;
        queue.push_back({ni, nj});
      }
    }
  }

  // A ring pixel is a seed if a retained edge pixel touches it; its strength
  // is its own gradient magnitude, so the ring pixel nearest the edge wins.
  std::vector<EdgeSeed> raw;
  for (const PixelCoord& p : ring) {
    bool touched = false;
    for (int dj = -1; dj <= 1 && !touched; ++dj) {
      for (int di = -1; di <= 1 && !touched; ++di) {
        const int ni = p.i + di;
        const int nj = p.j + dj;
        if (ni >= 0 && nj >= 0 && ni < w && nj < h && edge[flat(mask, ni, nj)]) touched = true;
      }
    }
    if (touched) raw.push_back({p, mag[flat(mask, p.i, p.j)]});
  }

  // Single-linkage clusters of seeds closer than cluster_radius; keep the
  // strongest of each (ties go to the smallest (j, i)).
  std::vector<int> cluster(raw.size(), -1);
  std::vector<EdgeSeed> kept;
  for (std::size_t s = 0; s < raw.size(); ++s) {
    if (cluster[s] >= 0) continue;
    const int id = static_cast<int>(kept.size());
    cluster[s] = id;
    std::vector<std::size_t> stack{s};
    EdgeSeed best = raw[s];
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      if (raw[a].strength > best.strength ||
          (raw[a].strength == best.strength && raw[a].at < best.at)) {
        best = raw[a];
      }
      for (std::size_t b = 0; b < raw.size(); ++b) {
        if (cluster[b] >= 0) continue;
        if (std::hypot(raw[a].at.i - raw[b].at.i, raw[a].at.j - raw[b].at.j) <= params.cluster_radius) {
          cluster[b] = id;
          stack.push_back(b);
        }
      }
    }
    kept.push_back(best);
  }
  std::sort(kept.begin(), kept.end(), [](const EdgeSeed& x, const EdgeSeed& y) { return x.at < y.at; });
  return kept;
}

namespace {

constexpr double kRayStep = 0.5;

// Label under the pixel containing p, or nullopt off the lattice.
std::optional<Label> label_under(const LabelMask& mask, Vec2 p) {
  const int j = static_cast<int>(std::floor(p.y + 0.5));
  int i = static_cast<int>(std::floor(p.x + 0.5));
  if (!mask.resolve(i, j)) return std::nullopt;
  return mask.at(i, j);
}

// Ray parameter at which the ray first lands on an Inpaint pixel, or -1.
double entry_distance(const LabelMask& mask, Vec2 origin, Vec2 dir, double max_t) {
  for (double t = kRayStep; t <= max_t + 1e-12; t += kRayStep) {
    const auto l = label_under(mask, origin + t * dir);
    if (!l) return -1.0;
    if (*l == Label::kInpaint) return t;
  }
  return -1.0;
}

}  // namespace

Spline make_spline(PixelCoord seed, const TensorSample& tensor, const LabelMask& mask,
                   double lambda, double max_entry_distance) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "Lambda must be > 0");
  // tanh saturates to exactly 1 in double precision; keep |g| strictly below.
  const double coherence = std::min(std::tanh((tensor.lambda_max - tensor.lambda_min) / lambda),
                                    std::nextafter(1.0, 0.0));
  const Vec2 origin{static_cast<double>(seed.i), static_cast<double>(seed.j)};
  const Vec2 v = tensor.v_min;
  const double t_plus = entry_distance(mask, origin, v, max_entry_distance);
  const double t_minus = entry_distance(mask, origin, -v, max_entry_distance);
  if (t_plus < 0.0 && t_minus < 0.0) {
    throw Error(ErrorCode::kNoEntry, "spline direction does not enter the inpainting domain");
  }
  const bool use_plus = t_plus >= 0.0 && (t_minus < 0.0 || t_plus <= t_minus);
  const Vec2 dir = use_plus ? v : -v;
  double t = use_plus ? t_plus : t_minus;

  Vec2 last = origin + t * dir;
  for (;;) {
    t += kRayStep;
    const Vec2 p = origin + t * dir;
    const auto l = label_under(mask, p);
    if (!l || *l == Label::kReadable) break;
    last = p;
  }
  Spline s;
  s.source = SplineSource::kAuto;
  s.direction = coherence * dir;
  s.points = {origin, last};
  return s;
}

GuideField build_guide_field(const std::vector<Spline>& splines, const LabelMask& mask, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eta must be > 0");
  GuideField field(mask.width(), mask.height());
  if (splines.empty()) return field;
  struct Flat {
    std::vector<Vec2> pts;
    Vec2 lo, hi;
    Vec2 dir;
  };
  std::vector<Flat> flats;
  for (const Spline& s : splines) {
    Flat f;
    f.pts = flatten(s);
    f.dir = s.direction;
    f.lo = f.hi = f.pts.front();
    for (const Vec2& p : f.pts) {
      f.lo = {std::min(f.lo.x, p.x), std::min(f.lo.y, p.y)};
      f.hi = {std::max(f.hi.x, p.x), std::max(f.hi.y, p.y)};
    }
    flats.push_back(std::move(f));
  }
  const double cutoff = 3.0 * eta;
  parallel_for(static_cast<std::size_t>(mask.height()), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    for (int i = 0; i < mask.width(); ++i) {
      if (mask.at(i, j) != Label::kInpaint) continue;
      const Vec2 x{static_cast<double>(i), static_cast<double>(j)};
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < flats.size(); ++k) {
        const Flat& f = flats[k];
        const double bx = std::max({f.lo.x - x.x, 0.0, x.x - f.hi.x});
        const double by = std::max({f.lo.y - x.y, 0.0, x.y - f.hi.y});
        const double box = std::hypot(bx, by);
        if (box > cutoff || box >= best) continue;
        const double dd = point_polyline_distance(x, f.pts);
        if (dd < best) {
          best = dd;
          best_k = k;
        }
      }
      if (best > cutoff) continue;
      field.at(i, j) = std::exp(-best * best / (2.0 * eta * eta)) * flats[best_k].dir;
    }
  }, 1);
  return field;
}

std::vector<Spline> detect_splines(const ImageBuffer& image, const LabelMask& mask,
                                   const DetectParams& params) {
  check_same_size(image, mask);
  const PixelSet ring = compute_ring(mask, params.sigma, params.rho);
  const std::vector<EdgeSeed> seeds = detect_edge_seeds(image, mask, ring, params);
  const double max_entry = params.max_entry_distance > 0.0
                               ? params.max_entry_distance
                               : 2.0 * ring_distance(params.sigma, params.rho);
  std::vector<Spline> out;
  for (const EdgeSeed& seed : seeds) {
    const TensorSample t = structure_tensor(image, mask, seed.at, params.sigma, params.rho);
    try {
      Spline s = make_spline(seed.at, t, mask, params.lambda, max_entry);
      s.id = "auto-" + std::to_string(out.size());
      out.push_back(std::move(s));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoEntry) throw;
    }
  }
  return out;
}

}  // namespace guidefill
