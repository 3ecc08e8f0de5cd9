#include "guidefill/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <numbers>
#include <sstream>

#include "guidefill/tracker.hpp"

namespace guidefill {

namespace {

constexpr double kTol = 1e-9;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

bool inside(const Rect& r, Vec2 p) {
  return p.x >= r.x0 - kTol && p.x <= r.x1 + kTol && p.y >= r.y0 - kTol && p.y <= r.y1 + kTol;
}

bool in_band(const SyntheticProblem& s, Vec2 p) {
  const double th = deg2rad(s.theta_deg);
  const double c = std::cos(th);
  if (std::abs(c) < 1e-12) return std::abs(p.x - s.line_point.x) <= s.half_width + kTol;
  const double y_line = s.line_point.y + std::tan(th) * (p.x - s.line_point.x);
  return std::abs(p.y - y_line) <= s.half_width + kTol;
}

}  // namespace

Vec2 pixel_center(const SyntheticProblem& spec, int i, int j) {
  const double dx = (spec.omega.x1 - spec.omega.x0) / spec.width;
  const double dy = (spec.omega.y1 - spec.omega.y0) / spec.height;
  return {spec.omega.x0 + (i + 0.5) * dx, spec.omega.y1 - (j + 0.5) * dy};
}

RenderedProblem render_problem(const SyntheticProblem& spec) {
  const Rect& o = spec.omega;
  const Rect& d = spec.domain;
  if (spec.width < 1 || spec.height < 1) throw Error(ErrorCode::kSpecError, "resolution must be positive");
  if (!(o.x0 < o.x1 && o.y0 < o.y1 && d.x0 < d.x1 && d.y0 < d.y1)) {
    throw Error(ErrorCode::kSpecError, "empty rectangle");
  }
  if (!(d.x0 > o.x0 && d.x1 < o.x1 && d.y0 > o.y0 && d.y1 < o.y1)) {
    throw Error(ErrorCode::kSpecError, "inpainting domain must lie strictly inside the image domain");
  }
  if (!(spec.half_width > 0.0)) throw Error(ErrorCode::kSpecError, "band must have positive width");

  RenderedProblem out{ImageBuffer(spec.width, spec.height, 1),
                      LabelMask(spec.width, spec.height, Label::kReadable),
                      ImageBuffer(spec.width, spec.height, 1)};
  for (int j = 0; j < spec.height; ++j) {
    for (int i = 0; i < spec.width; ++i) {
      const Vec2 p = pixel_center(spec, i, j);
      const auto v = static_cast<float>(in_band(spec, p) ? spec.line_value : spec.background);
      out.truth.at(i, j, 0) = v;
      if (inside(d, p)) {
        out.mask.set(i, j, Label::kInpaint);
      } else {
        out.image.at(i, j, 0) = v;
      }
    }
  }
  return out;
}

SyntheticProblem degradation_problem(int width, int height) {
  SyntheticProblem s;
  s.omega = {-1.0, 1.0, -0.5, 0.5};
  s.domain = {-0.8, 0.8, -0.3, 0.3};
  s.theta_deg = 73.0;
  s.line_point = {0.0, 0.0};
  s.half_width = 0.1;
  s.width = width;
  s.height = height;
  return s;
}

SyntheticProblem stripe_problem(int width) {
  SyntheticProblem s;
  s.omega = {0.0, 4.0, 0.0, 1.0};
  s.domain = {0.4, 3.96, 0.2, 0.8};
  s.theta_deg = 0.0;
  s.line_point = {0.0, 0.5};
  s.half_width = 0.05;
  s.width = width;
  s.height = width / 4;
  return s;
}

int transition_width_samples(const std::vector<double>& row) {
  if (row.empty()) return 0;
  const auto peak = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  const double hi_v = row[peak];
  const double lo_v = *std::min_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(peak) + 1);
  const double span = hi_v - lo_v;
  if (span <= 0.0) return 0;
  const double lo = lo_v + 0.1 * span;
  const double hi = lo_v + 0.9 * span;
  std::size_t q_hi = 0;
  while (q_hi < peak && row[q_hi] < hi) ++q_hi;
  std::ptrdiff_t q_lo = static_cast<std::ptrdiff_t>(q_hi) - 1;
  while (q_lo >= 0 && row[static_cast<std::size_t>(q_lo)] > lo) --q_lo;
  if (q_lo < 0) return static_cast<int>(q_hi);
  return static_cast<int>(q_hi) - static_cast<int>(q_lo);
}

std::vector<DegradationRow> degradation_study(const std::vector<std::pair<int, int>>& resolutions,
                                              const std::vector<double>& cross_sections) {
  std::vector<DegradationRow> out;
  for (const auto& [w, h] : resolutions) {
    const SyntheticProblem spec = degradation_problem(w, h);
    const RenderedProblem prob = render_problem(spec);
    FillParams params = guidefill_params();
    params.order = FillOrder::kOnion;
    params.g_source = GuideSource::kFixed;
    const double th = deg2rad(spec.theta_deg);
    params.fixed_g = {std::cos(th), -std::sin(th)};
    const FillResult res = inpaint(prob.image, prob.mask, params);
    const double dx = (spec.omega.x1 - spec.omega.x0) / w;
    const double dy = (spec.omega.y1 - spec.omega.y0) / h;
    for (double y : cross_sections) {
      const double jr = (spec.omega.y1 - y) / dy - 0.5;
      int j = static_cast<int>(std::floor(jr));
      if (jr - j > 0.5 + kTol) ++j;
      j = std::clamp(j, 0, h - 1);
      std::vector<double> row(static_cast<std::size_t>(w));
      for (int i = 0; i < w; ++i) row[static_cast<std::size_t>(i)] = res.image.at(i, j, 0);
      out.push_back({w, h, y, transition_width_samples(row) * dx});
    }
  }
  return out;
}

std::vector<ScalingRow> scaling_study(const std::vector<int>& widths, bool tracked) {
  std::vector<ScalingRow> out;
  for (int w : widths) {
    const SyntheticProblem spec = stripe_problem(w);
    const RenderedProblem prob = render_problem(spec);
    FillParams params = guidefill_params();
    params.order = FillOrder::kOnion;
    params.g_source = GuideSource::kFixed;
    params.fixed_g = {0.0, 0.0};
    params.tracked = tracked;
    const FillResult res = inpaint(prob.image, prob.mask, params);

    int i_lo = spec.width, i_hi = -1, j_lo = spec.height, j_hi = -1;
    for (int j = 0; j < spec.height; ++j) {
      for (int i = 0; i < spec.width; ++i) {
        if (prob.mask.at(i, j) != Label::kInpaint) continue;
        i_lo = std::min(i_lo, i), i_hi = std::max(i_hi, i);
        j_lo = std::min(j_lo, j), j_hi = std::max(j_hi, j);
      }
    }
    ScalingRow row;
    row.width = spec.width;
    row.height = spec.height;
    row.n = res.report.inpaint_pixels;
    row.wall_ms = res.report.total_ms;
    row.iterations = res.report.iteration_count();
    for (const IterationStats& s : res.report.iterations) {
      row.threads_max = std::max(row.threads_max, s.threads_requested);
    }
    const int extent = std::min(i_hi - i_lo + 1, j_hi - j_lo + 1);
    row.analytic_iterations = static_cast<std::size_t>((extent + 1) / 2);
    out.push_back(row);
  }
  return out;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw Error(ErrorCode::kDegenerateFit, "need at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0)) throw Error(ErrorCode::kInvalidArgument, "power-law data must be positive");
    sx += std::log(n);
    sy += std::log(v);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, v] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::kDegenerateFit, "all N are equal");
  PowerLawFit fit;
  fit.alpha = sxy / sxx;
  const double log_a = my - fit.alpha * mx;
  fit.a = std::exp(log_a);
  double rss = 0.0;
  for (const auto& [n, v] : points) {
    const double e = std::log(v) - (log_a + fit.alpha * std::log(n));
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / k);
  return fit;
}

KinkingProblem make_kinking_problem(int n, double theta_deg, int known_rows) {
  if (n < 8 || known_rows < 1 || known_rows >= n) {
    throw Error(ErrorCode::kInvalidArgument, "bad kinking problem size");
  }
  const double th = deg2rad(theta_deg);
  const double cot = std::abs(theta_deg - 90.0) < 1e-12 ? 0.0 : std::cos(th) / std::sin(th);
  KinkingProblem p{ImageBuffer(n, n, 1), LabelMask(n, n, Label::kReadable), known_rows};
  p.mask.set_periodic_x(true);
  for (int j = 0; j < n; ++j) {
    const double y = (n - known_rows) - j;
    for (int i = 0; i < n; ++i) {
      if (y > 0.0) {
        p.mask.set(i, j, Label::kInpaint);
        continue;
      }
      double s = (i - cot * y) / n;
      s -= std::floor(s);
      p.image.at(i, j, 0) = (s >= 0.25 && s < 0.75) ? 1.0f : 0.0f;
    }
  }
  return p;
}

double measure_edge_angle(const ImageBuffer& image, int known_rows) {
  const int n = image.width();
  const int top_known = image.height() - known_rows;
  auto crossings = [&](int j) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) {
      const double a = image.at(i, j, 0);
      const double b = image.at((i + 1) % n, j, 0);
      if (a < 0.5 && b >= 0.5) xs.push_back(i + (0.5 - a) / (b - a));
    }
    return xs;
  };
  // Start from the edge in the first known row and follow it upward.
  std::vector<double> first = crossings(top_known);
  if (first.empty()) throw Error(ErrorCode::kDegenerateFit, "no edge in the known rows");
  double prev = *std::min_element(first.begin(), first.end(), [&](double a, double b) {
    return std::abs(a - 0.25 * n) < std::abs(b - 0.25 * n);
  });
  std::vector<std::pair<double, double>> pts;  // (Y, x)
  for (int j = top_known - 1; j >= 0; --j) {
    const std::vector<double> xs = crossings(j);
    if (xs.empty()) throw Error(ErrorCode::kDegenerateFit, "edge lost while tracking");
    double best = 0.0;
    double best_d = std::numeric_limits<double>::infinity();
    for (double x : xs) {
      double d = std::remainder(x - prev, static_cast<double>(n));
      if (std::abs(d) < best_d) best_d = std::abs(d), best = prev + d;
    }
    prev = best;
    pts.emplace_back(static_cast<double>(top_known - j), best);
  }
  double my = 0.0, mx = 0.0;
  for (const auto& [y, x] : pts) my += y, mx += x;
  my /= static_cast<double>(pts.size());
  mx /= static_cast<double>(pts.size());
  double syy = 0.0, sxy = 0.0;
  for (const auto& [y, x] : pts) syy += (y - my) * (y - my), sxy += (y - my) * (x - mx);
  if (syy == 0.0) throw Error(ErrorCode::kDegenerateFit, "need at least two rows");
  const double slope = sxy / syy;  // dx/dY
  return std::atan2(1.0, slope) * 180.0 / std::numbers::pi;
}

double kinking_angle(int n, double theta_deg, Neighborhood neighborhood, int r, double mu) {
  const KinkingProblem p = make_kinking_problem(n, theta_deg);
  FillParams params;
  params.r = r;
  params.mu = mu;
  params.order = FillOrder::kOnion;
  params.neighborhood = neighborhood;
  params.g_source = GuideSource::kFixed;
  const double th = deg2rad(theta_deg);
  params.fixed_g = {std::cos(th), -std::sin(th)};
  const FillResult res = inpaint(p.image, p.mask, params);
  return measure_edge_angle(res.image, p.known_rows);
}

ShockScene make_shock_scene(int width, int height, int d_x0, int d_x1) {
  if (!(0 < d_x0 && d_x0 <= d_x1 && d_x1 < width - 1)) {
    throw Error(ErrorCode::kInvalidArgument, "shock domain must leave readable columns on both sides");
  }
  ShockScene s{ImageBuffer(width, height, 3), LabelMask(width, height, Label::kReadable), d_x0, d_x1};
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      if (i >= d_x0 && i <= d_x1) {
        s.mask.set(i, j, Label::kInpaint);
        continue;
      }
      s.image.at(i, j, i < width / 2 ? 0 : 1) = 1.0f;
    }
  }
  return s;
}

ShockMeasure measure_shock(const ImageBuffer& image, int x_begin, int x_end) {
  std::vector<double> g;
  for (int i = x_begin; i < x_end; ++i) {
    double acc = 0.0;
    for (int j = 0; j < image.height(); ++j) {
      double d2 = 0.0;
      for (int c = 0; c < image.channels(); ++c) {
        const double d = image.at(i + 1, j, c) - image.at(i, j, c);
        d2 += d * d;
      }
      acc += std::sqrt(d2);
    }
    g.push_back(acc / image.height());
  }
  ShockMeasure m;
  const auto peak = static_cast<int>(std::max_element(g.begin(), g.end()) - g.begin());
  m.column = x_begin + peak;
  m.peak = g[static_cast<std::size_t>(peak)];
  for (int k = 0; k < static_cast<int>(g.size()); ++k) {
    if (std::abs(k - peak) >= 2) m.runner_up = std::max(m.runner_up, g[static_cast<std::size_t>(k)]);
  }
  return m;
}

SmartOrderScene make_smart_order_scene() {
  constexpr int kW = 240, kH = 160;
  constexpr int kX0 = 60, kX1 = 179, kY0 = 50, kY1 = 109;
  constexpr double kAngle = 15.0;
  constexpr double kHalfThickness = 6.0;
  const Vec2 c{119.5, 79.5};
  const double th = deg2rad(kAngle);
  const Vec2 dir{std::cos(th), -std::sin(th)};  // image frame
  SmartOrderScene s{ImageBuffer(kW, kH, 1), LabelMask(kW, kH, Label::kReadable), {}, {}, 1.0};
  for (int j = 0; j < kH; ++j) {
    for (int i = 0; i < kW; ++i) {
      if (i >= kX0 && i <= kX1 && j >= kY0 && j <= kY1) {
        s.mask.set(i, j, Label::kInpaint);
        continue;
      }
      const Vec2 d = Vec2{static_cast<double>(i), static_cast<double>(j)} - c;
      if (std::abs(dot(perp(dir), d)) <= kHalfThickness) s.image.at(i, j, 0) = 1.0f;
    }
  }
  Spline sp;
  sp.id = "line";
  sp.source = SplineSource::kUser;
  sp.direction = 0.999 * dir;
  sp.points = {c + (-100.0) * dir, c + 100.0 * dir};
  s.splines.push_back(sp);
  const int mid = (kX0 + kX1 + 1) / 2;
  const double t = (mid - c.x) / dir.x;
  s.probe = {mid, static_cast<int>(std::lround(c.y + t * dir.y))};
  return s;
}

double midline_discontinuity(const ImageBuffer& result, const SmartOrderScene& scene) {
  return std::abs(result.at(scene.probe.i, scene.probe.j, 0) - scene.line_value);
}

EdgeScene make_edge_scene() {
  EdgeScene s{ImageBuffer(100, 100, 1), LabelMask(100, 100, Label::kReadable), {50, 50}, {64, 36}};
  for (int j = 0; j < 100; ++j) {
    for (int i = 0; i < 100; ++i) {
      const int x = i - 50;
      const int y = 50 - j;
      if (j >= 50) {
        s.mask.set(i, j, Label::kInpaint);
        continue;
      }
      s.image.at(i, j, 0) = y < x ? 1.0f : 0.5f;
    }
  }
  return s;
}

std::filesystem::path study_csv_path(const std::filesystem::path& dir, const std::string& study) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%S", &tm);
  return dir / (study + "_" + buf + ".csv");
}

std::string gnuplot_script(const std::filesystem::path& csv, int x, int y, const std::string& title) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set title '" << title << "'\n"
     << "plot '" << csv.string() << "' using " << x << ':' << y << " with linespoints\n";
  return os.str();
}

}  // namespace guidefill
