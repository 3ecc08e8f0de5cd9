#include "guidefill/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "guidefill/parallel.hpp"
#include "guidefill/structure_tensor.hpp"
#include "guidefill/tracker.hpp"

namespace guidefill {

FillParams guidefill_params() { return {}; }

FillParams coherence_transport_params() {
  FillParams p;
  p.r = 5;
  p.order = FillOrder::kOnion;
  p.neighborhood = Neighborhood::kAxisBall;
  p.g_source = GuideSource::kModifiedStructureTensor;
  return p;
}

FillParams telea_params() {
  FillParams p;
  p.order = FillOrder::kOnion;
  p.neighborhood = Neighborhood::kAxisBall;
  p.g_source = GuideSource::kFixed;
  p.fixed_g = {0.0, 0.0};
  return p;
}

void validate(const FillParams& params) {
  if (params.r < 1) throw Error(ErrorCode::kInvalidArgument, "r must be >= 1");
  if (std::isnan(params.mu) || params.mu < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "mu must be >= 0");
  }
  if (!(params.c >= 0.0 && params.c < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "c must lie in [0, 1)");
  }
  if (!std::isfinite(params.fixed_g.x) || !std::isfinite(params.fixed_g.y)) {
    throw Error(ErrorCode::kInvalidArgument, "fixed g must be finite");
  }
}

double weight(Vec2 x, Vec2 y, Vec2 g, double mu, double eps) {
  const Vec2 d = y - x;
  const double len = norm(d);
  if (len == 0.0) throw Error(ErrorCode::kInvalidArgument, "weight undefined at y == x");
  const double along = dot(perp(g), d);
  if (along == 0.0) return 1.0 / len;
  return std::exp(-(mu * mu) / (2.0 * eps * eps) * along * along) / len;
}

std::vector<Vec2> neighborhood_offsets(const FillParams& params, Vec2 g) {
  const Rotation rot =
      params.neighborhood == Neighborhood::kRotatedBall ? rotation_onto(g) : Rotation{};
  std::vector<Vec2> out;
  for (const Vec2& off : ball_offsets(params.r)) {
    if (off.x == 0.0 && off.y == 0.0) continue;
    out.push_back(rot.apply(off));
  }
  return out;
}

namespace {

constexpr double kArgminTolerance = 1e-9;
constexpr double kFastPathFloor = 1e-280;

// Per-g ball geometry and weights; shared by every pixel with the same g.
struct Stencil {
  std::vector<Vec2> offsets;
  bool infinite = false;
  // Finite mu: log weights and their exponentials relative to the global max.
  std::vector<double> log_w;
  std::vector<double> rel_w;
  double rel_total = 0.0;
  // Infinite mu: |g_perp . d| and 1/|d|.
  std::vector<double> dev;
  std::vector<double> inv_len;
  double min_dev = 0.0;
  double argmin_mass = 0.0;
};

Stencil make_stencil(const FillParams& params, Vec2 g) {
  Stencil s;
  s.offsets = neighborhood_offsets(params, g);
  const std::size_t n = s.offsets.size();
  s.infinite = std::isinf(params.mu);
  const Vec2 gp = perp(g);
  if (s.infinite) {
    s.dev.resize(n);
    s.inv_len.resize(n);
    s.min_dev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      s.dev[k] = std::abs(dot(gp, s.offsets[k]));
      s.inv_len[k] = 1.0 / norm(s.offsets[k]);
      s.min_dev = std::min(s.min_dev, s.dev[k]);
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (s.dev[k] <= s.min_dev + kArgminTolerance) s.argmin_mass += s.inv_len[k];
    }
    return s;
  }
  const double eps = static_cast<double>(params.r);
  const double alpha = params.mu * params.mu / (2.0 * eps * eps);
  s.log_w.resize(n);
  s.rel_w.resize(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double along = dot(gp, s.offsets[k]);
    s.log_w[k] = -std::log(norm(s.offsets[k])) - alpha * along * along;
    top = std::max(top, s.log_w[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    s.rel_w[k] = std::exp(s.log_w[k] - top);
    s.rel_total += s.rel_w[k];
  }
  return s;
}

struct Evaluation {
  std::optional<Color> color;
  double confidence = 0.0;
};

Evaluation evaluate(PixelCoord x, const ImageBuffer& image, const LabelMask& mask,
                    const Stencil& s) {
  const std::size_t n = s.offsets.size();
  const Vec2 center{static_cast<double>(x.i), static_cast<double>(x.j)};
  const int channels = image.channels();
  // Small fixed buffers: r <= 16 keeps the ball under 1024 members.
  thread_local std::vector<Color> samples;
  thread_local std::vector<std::size_t> members;
  samples.clear();
  members.clear();
  for (std::size_t k = 0; k < n; ++k) {
    auto c = sample_bilinear(image, mask, center + s.offsets[k]);
    if (!c) continue;
    samples.push_back(*c);
    members.push_back(k);
  }
  Evaluation ev;
  if (members.empty()) return ev;

  Color acc;
  acc.channels = channels;
  double mass = 0.0;
  if (s.infinite) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k : members) best = std::min(best, s.dev[k]);
    for (std::size_t m = 0; m < members.size(); ++m) {
      const std::size_t k = members[m];
      if (s.dev[k] > best + kArgminTolerance) continue;
      const double w = s.inv_len[k];
      mass += w;
      for (int c = 0; c < channels; ++c) acc[c] += w * samples[m][c];
    }
    ev.confidence = best <= s.min_dev + kArgminTolerance ? mass / s.argmin_mass : 0.0;
  } else {
    for (std::size_t m = 0; m < members.size(); ++m) {
      const double w = s.rel_w[members[m]];
      mass += w;
      for (int c = 0; c < channels; ++c) acc[c] += w * samples[m][c];
    }
    ev.confidence = mass / s.rel_total;
    if (!(mass > kFastPathFloor)) {
      // Readable members carry negligible mass next to the ball's maximum;
      // renormalize against the readable maximum instead.
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t k : members) top = std::max(top, s.log_w[k]);
      acc = Color{};
      acc.channels = channels;
      mass = 0.0;
      for (std::size_t m = 0; m < members.size(); ++m) {
        const double w = std::exp(s.log_w[members[m]] - top);
        mass += w;
        for (int c = 0; c < channels; ++c) acc[c] += w * samples[m][c];
      }
    }
  }
  for (int c = 0; c < channels; ++c) acc[c] /= mass;
  ev.color = acc;
  ev.confidence = std::clamp(ev.confidence, 0.0, 1.0);
  return ev;
}

}  // namespace

std::optional<Color> fill_color(PixelCoord x, const ImageBuffer& image, const LabelMask& mask,
                                const FillParams& params, Vec2 g) {
  validate(params);
  check_same_size(image, mask);
  return evaluate(x, image, mask, make_stencil(params, g)).color;
}

double confidence(PixelCoord x, const ImageBuffer& image, const LabelMask& mask,
                  const FillParams& params, Vec2 g) {
  validate(params);
  check_same_size(image, mask);
  return evaluate(x, image, mask, make_stencil(params, g)).confidence;
}

bool ready(double c, double g_norm, const FillParams& params, bool data_phase) {
  switch (params.order) {
    case FillOrder::kOnion:
      return true;
    case FillOrder::kSmart:
      return c > params.c;
    case FillOrder::kSmartWithDataTerm:
      if (data_phase) return g_norm > params.c2 && c > params.c;
      return c > params.c;
  }
  return true;
}

Vec2 guide_at(PixelCoord x, const ImageBuffer& image, const LabelMask& mask,
              const GuideField* guide, const FillParams& params) {
  switch (params.g_source) {
    case GuideSource::kFixed:
      return params.fixed_g;
    case GuideSource::kGuideField:
      return guide ? guide->at(x.i, x.j) : Vec2{};
    case GuideSource::kModifiedStructureTensor:
      try {
        const TensorSample t = modified_structure_tensor(image, mask, x, params.sigma, params.rho);
        return std::tanh((t.lambda_max - t.lambda_min) / params.lambda) * t.v_min;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kZeroMass) throw;
        return {};
      }
  }
  return {};
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Inverse-distance average over Readable 8-neighbors; nullopt if none.
std::optional<Color> neighbor_average(PixelCoord x, const ImageBuffer& image, const LabelMask& mask) {
  Color acc;
  acc.channels = image.channels();
  double mass = 0.0;
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      int ni = x.i + di;
      const int nj = x.j + dj;
      if (!mask.resolve(ni, nj) || !mask.readable(ni, nj)) continue;
      const double w = 1.0 / std::hypot(di, dj);
      mass += w;
      for (int c = 0; c < image.channels(); ++c) acc[c] += w * image.at(ni, nj, c);
    }
  }
  if (mass == 0.0) return std::nullopt;
  for (int c = 0; c < image.channels(); ++c) acc[c] /= mass;
  return acc;
}

// Fills every remaining Inpaint pixel with the color of the nearest Readable
// pixel (Chebyshev BFS over the whole lattice), or 0 when none exists.
std::size_t fill_unreachable(ImageBuffer& image, LabelMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> source(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  std::deque<int> queue;
  for (int k = 0; k < w * h; ++k) {
    if (mask.readable(k % w, k / w)) {
      source[static_cast<std::size_t>(k)] = k;
      queue.push_back(k);
    }
  }
  while (!queue.empty()) {
    const int k = queue.front();
    queue.pop_front();
    const int i = k % w;
    const int j = k / w;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        int ni = i + di;
        const int nj = j + dj;
        if (!mask.resolve(ni, nj)) continue;
        const auto q = static_cast<std::size_t>(nj * w + ni);
        if (source[q] >= 0) continue;
        source[q] = source[static_cast<std::size_t>(k)];
        queue.push_back(nj * w + ni);
      }
    }
  }
  std::size_t count = 0;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      if (mask.at(i, j) != Label::kInpaint) continue;
      const int s = source[static_cast<std::size_t>(j * w + i)];
      for (int c = 0; c < image.channels(); ++c) {
        image.at(i, j, c) = s >= 0 ? image.at(s % w, s / w, c) : 0.0f;
      }
      mask.set(i, j, Label::kReadable);
      ++count;
    }
  }
  return count;
}

FillResult inpaint_impl(const ImageBuffer& image, const LabelMask& mask, const GuideField* guide,
                        const FillParams& params) {
  validate(params);
  check_same_size(image, mask);
  if (guide && params.g_source == GuideSource::kGuideField &&
      (guide->width != mask.width() || guide->height != mask.height())) {
    throw Error(ErrorCode::kDimensionMismatch, "guide field size differs from the mask");
  }
  const auto t_start = Clock::now();
  FillResult res{image, mask, {}};
  ImageBuffer& img = res.image;
  LabelMask& m = res.mask;
  FillReport& report = res.report;
  std::size_t remaining = m.count(Label::kInpaint);
  report.inpaint_pixels = remaining;
  if (remaining == 0) return res;

  const std::size_t lattice = static_cast<std::size_t>(m.width()) * static_cast<std::size_t>(m.height());
  PixelSet frontier = active_boundary(m);
  if (params.tracked) report.initial_scan = lattice;

  const bool constant_g = params.g_source == GuideSource::kFixed;
  const Stencil fixed_stencil = make_stencil(params, params.fixed_g);
  const Stencil zero_stencil = make_stencil(params, Vec2{});

  std::vector<Vec2> g;
  std::vector<Evaluation> evals;
  while (remaining > 0) {
    if (frontier.empty()) {
      report.unfillable_pixels = fill_unreachable(img, m);
      break;
    }
    const auto t_iter = Clock::now();
    const std::size_t n = frontier.size();
    g.assign(n, Vec2{});
    evals.assign(n, Evaluation{});
    parallel_for(n, [&](std::size_t k) {
      const PixelCoord x = frontier[k];
      g[k] = guide_at(x, img, m, guide, params);
      if (constant_g) {
        evals[k] = evaluate(x, img, m, fixed_stencil);
      } else if (g[k].x == 0.0 && g[k].y == 0.0) {
        evals[k] = evaluate(x, img, m, zero_stencil);
      } else {
        evals[k] = evaluate(x, img, m, make_stencil(params, g[k]));
      }
    }, 64);

    bool data_phase = false;
    if (params.order == FillOrder::kSmartWithDataTerm) {
      data_phase = std::any_of(g.begin(), g.end(), [&](Vec2 v) { return norm(v) > params.c2; });
    }
    PixelSet filled;
    std::vector<Color> colors;
    for (std::size_t k = 0; k < n; ++k) {
      if (!evals[k].color) continue;
      if (!ready(evals[k].confidence, norm(g[k]), params, data_phase)) continue;
      filled.push_back(frontier[k]);
      colors.push_back(*evals[k].color);
    }
    IterationStats stats;
    stats.frontier_size = n;
    if (filled.empty()) {
      // Deadlock guard: force the most confident pixel that has data.
      std::size_t best = n;
      for (std::size_t k = 0; k < n; ++k) {
        if (!evals[k].color) continue;
        if (best == n || evals[k].confidence > evals[best].confidence) best = k;
      }
      if (best < n) {
        filled.push_back(frontier[best]);
        colors.push_back(*evals[best].color);
      } else {
        auto c = neighbor_average(frontier.front(), img, m);
        if (!c) throw Error(ErrorCode::kInvariantBreach, "frontier pixel without readable neighbor");
        filled.push_back(frontier.front());
        colors.push_back(*c);
      }
      stats.forced = true;
      ++report.forced_fills;
    }
    for (std::size_t k = 0; k < filled.size(); ++k) {
      img.set_color(filled[k].i, filled[k].j, colors[k]);
      m.set(filled[k], Label::kReadable);
    }
    remaining -= filled.size();
    stats.filled = filled.size();

    if (params.tracked) {
      FrontierUpdate up = update_frontier(frontier, filled, m);
      frontier = std::move(up.frontier);
      stats.candidates = up.candidates;
      stats.threads_requested = std::max(n, up.threads_requested);
      if (params.verify_tracking && frontier != active_boundary(m)) {
        throw Error(ErrorCode::kInvariantBreach, "tracked frontier differs from a full scan");
      }
    } else {
      frontier = active_boundary(m);
      stats.candidates = lattice;
      stats.threads_requested = lattice;
    }
    stats.wall_ms = ms_since(t_iter);
    report.iterations.push_back(stats);
  }
  report.total_ms = ms_since(t_start);
  return res;
}

}  // namespace

FillResult inpaint(const ImageBuffer& image, const LabelMask& mask, const GuideField& guide,
                   const FillParams& params) {
  return inpaint_impl(image, mask, &guide, params);
}

FillResult inpaint(const ImageBuffer& image, const LabelMask& mask, const FillParams& params) {
  return inpaint_impl(image, mask, nullptr, params);
}

}  // namespace guidefill
