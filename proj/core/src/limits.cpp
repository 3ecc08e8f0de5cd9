#include "guidefill/limits.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "guidefill/engine.hpp"

namespace guidefill {

namespace {

constexpr double kHalfPlaneSlack = 1e-9;
constexpr double kArgminTolerance = 1e-9;

Vec2 unit_or_zero(Vec2 g) {
  const double len = norm(g);
  if (!std::isfinite(len)) throw Error(ErrorCode::kInvalidArgument, "g must be finite");
  if (len == 0.0) return {};
  return {g.x / len, g.y / len};
}

}  // namespace

HalfBallSet half_ball(BallKind kind, int r, Vec2 g) {
  if (r < 1) throw Error(ErrorCode::kInvalidArgument, "r must be >= 1");
  HalfBallSet set;
  set.kind = kind;
  set.r = r;
  set.g = unit_or_zero(g);
  const bool rotate = kind == BallKind::kRotated && (set.g.x != 0.0 || set.g.y != 0.0);
  const Vec2 gp = perp(set.g);
  for (int m = -r; m <= r; ++m) {
    for (int n = -r; n <= r; ++n) {
      if (n * n + m * m > r * r) continue;
      if (!rotate) {
        if (m <= -1) set.points.push_back({static_cast<double>(n), static_cast<double>(m)});
        continue;
      }
      const Vec2 y = n * set.g + m * gp;
      if (y.y <= -1.0 + kHalfPlaneSlack) set.points.push_back(y);
    }
  }
  return set;
}

double transport_angle(Vec2 g_star) { return std::atan2(-g_star.y, -g_star.x); }

LimitPrediction limit_direction(BallKind kind, int r, double mu, Vec2 g) {
  if (std::isnan(mu) || mu < 0.0) throw Error(ErrorCode::kInvalidArgument, "mu must be >= 0");
  const HalfBallSet set = half_ball(kind, r, g);
  if (set.points.empty()) throw Error(ErrorCode::kEmptySet, "half-ball is empty");
  const Vec2 gp = perp(set.g);
  Vec2 acc;
  double mass = 0.0;
  if (std::isinf(mu)) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& y : set.points) best = std::min(best, std::abs(dot(gp, y)));
    for (const Vec2& y : set.points) {
      if (std::abs(dot(gp, y)) > best + kArgminTolerance) continue;
      const double w = 1.0 / norm(y);
      acc = acc + w * y;
      mass += w;
    }
  } else {
    // Shift log weights by their maximum so large mu cannot underflow.
    const double alpha = mu * mu / (2.0 * r * r);
    std::vector<double> lw;
    double top = -std::numeric_limits<double>::infinity();
    for (const Vec2& y : set.points) {
      const double t = dot(gp, y);
      lw.push_back(-std::log(norm(y)) - alpha * t * t);
      top = std::max(top, lw.back());
    }
    for (std::size_t k = 0; k < set.points.size(); ++k) {
      const double w = std::exp(lw[k] - top);
      acc = acc + w * set.points[k];
      mass += w;
    }
  }
  LimitPrediction out;
  out.g_star = {acc.x / mass, acc.y / mass};
  out.theta_star = transport_angle(out.g_star);
  return out;
}

std::vector<CurvePoint> theta_star_curve(BallKind kind, int r, double mu, int samples) {
  if (samples < 2) throw Error(ErrorCode::kInvalidArgument, "samples must be >= 2");
  std::vector<CurvePoint> out;
  for (int k = 1; k <= samples; ++k) {
    const double deg = 180.0 * k / (samples + 1);
    const double rad = deg * std::numbers::pi / 180.0;
    CurvePoint p;
    p.theta_deg = deg;
    try {
      p.theta_star_deg =
          limit_direction(kind, r, mu, {std::cos(rad), std::sin(rad)}).theta_star * 180.0 / std::numbers::pi;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptySet) throw;
      p.theta_star_deg = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(p);
  }
  return out;
}

namespace {

// int_0^1 exp(-a s^2) ds
double radial_mass(double a) {
  if (a < 1e-8) return 1.0 - a / 3.0;
  const double s = std::sqrt(a);
  return std::sqrt(std::numbers::pi) / (2.0 * s) * std::erf(s);
}

// int_0^1 s exp(-a s^2) ds
double radial_moment(double a) {
  if (a < 1e-8) return 0.5 - a / 4.0;
  return -std::expm1(-a) / (2.0 * a);
}

}  // namespace

LimitPrediction marz_limit_direction(double mu, Vec2 g) {
  if (std::isnan(mu) || mu < 0.0) throw Error(ErrorCode::kInvalidArgument, "mu must be >= 0");
  const Vec2 u = unit_or_zero(g);
  const Vec2 up = perp(u);
  const bool isotropic = mu == 0.0 || (u.x == 0.0 && u.y == 0.0);
  LimitPrediction out;
  if (!isotropic && std::isinf(mu)) {
    // The weight collapses onto the line through 0 along g.
    if (u.y == 0.0) throw Error(ErrorCode::kInvalidArgument, "g parallel to the boundary");
    out.g_star = u.y > 0.0 ? -u : u;
    out.theta_star = transport_angle(out.g_star);
    return out;
  }
  const double half_mu2 = isotropic ? 0.0 : 0.5 * mu * mu;
  auto a_of = [&](double phi) {
    const double t = up.x * std::cos(phi) + up.y * std::sin(phi);
    return half_mu2 * t * t;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  constexpr double kTol = 1e-6;
  std::vector<double> cuts{std::numbers::pi};
  if (!isotropic && u.y != 0.0) {
    const Vec2 down = u.y > 0.0 ? -u : u;
    double phi0 = std::atan2(down.y, down.x);
    if (phi0 < 0.0) phi0 += 2.0 * std::numbers::pi;
    cuts.push_back(phi0);
  }
  cuts.push_back(2.0 * std::numbers::pi);

  double mx = 0.0, my = 0.0, den = 0.0;
  double ex = 0.0, ey = 0.0, eden = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double err = 0.0;
    mx += GK::integrate([&](double phi) { return std::cos(phi) * radial_moment(a_of(phi)); },
                        cuts[k], cuts[k + 1], 20, kTol * 1e-2, &err);
    ex += err;
    my += GK::integrate([&](double phi) { return std::sin(phi) * radial_moment(a_of(phi)); },
                        cuts[k], cuts[k + 1], 20, kTol * 1e-2, &err);
    ey += err;
    den += GK::integrate([&](double phi) { return radial_mass(a_of(phi)); }, cuts[k],
                         cuts[k + 1], 20, kTol * 1e-2, &err);
    eden += err;
  }
  const double scale = std::hypot(mx, my);
  if (!(eden <= kTol * std::abs(den)) || !(std::hypot(ex, ey) <= kTol * scale)) {
    throw Error(ErrorCode::kQuadratureFailure, "half-disk quadrature missed its tolerance");
  }
  out.g_star = {mx / den, my / den};
  out.theta_star = transport_angle(out.g_star);
  return out;
}

double weak_solution(const Trace& u0, double theta_star, double x, double y) {
  if (!(theta_star > 0.0 && theta_star < std::numbers::pi)) {
    throw Error(ErrorCode::kInvalidArgument, "theta* must lie in (0, pi)");
  }
  // cot is exactly 0 at pi/2 only up to rounding of the angle.
  const double cot = std::abs(theta_star - std::numbers::pi / 2) < 1e-15
                         ? 0.0
                         : std::cos(theta_star) / std::sin(theta_star);
  double s = x - cot * y;
  s -= std::floor(s);
  if (s >= 1.0) s = 0.0;
  return u0(s);
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceSetup& setup,
                                              const std::vector<int>& resolutions,
                                              const std::vector<double>& p_norms) {
  if (!setup.u0) throw Error(ErrorCode::kInvalidArgument, "missing trace");
  const LimitPrediction lim = limit_direction(setup.kind, setup.r, setup.mu, setup.g);
  const Vec2 gu = unit_or_zero(setup.g);

  FillParams params;
  params.r = setup.r;
  params.mu = setup.mu;
  params.order = FillOrder::kOnion;
  params.neighborhood =
      setup.kind == BallKind::kRotated ? Neighborhood::kRotatedBall : Neighborhood::kAxisBall;
  params.g_source = GuideSource::kFixed;
  params.fixed_g = {gu.x, -gu.y};

  std::vector<std::vector<double>> errors(resolutions.size());
  for (std::size_t ri = 0; ri < resolutions.size(); ++ri) {
    const int n = resolutions[ri];
    if (n < 2) throw Error(ErrorCode::kInvalidArgument, "resolution must be >= 2");
    const int strip = setup.r + 2;
    const double h = 1.0 / n;
    ImageBuffer image(n, n + strip, 1);
    LabelMask mask(n, n + strip, Label::kReadable);
    mask.set_periodic_x(true);
    for (int j = 0; j < n + strip; ++j) {
      const double y = (n - j) * h;
      for (int i = 0; i < n; ++i) {
        if (j < n) {
          mask.set(i, j, Label::kInpaint);
        } else {
          image.at(i, j, 0) = static_cast<float>(weak_solution(setup.u0, lim.theta_star, i * h, y));
        }
      }
    }
    const FillResult res = inpaint(image, mask, params);
    for (double p : p_norms) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const double y = (n - j) * h;
        for (int i = 0; i < n; ++i) {
          const double e = std::abs(res.image.at(i, j, 0) -
                                    weak_solution(setup.u0, lim.theta_star, i * h, y));
          if (std::isinf(p)) {
            acc = std::max(acc, e);
          } else {
            acc += h * h * std::pow(e, p);
          }
        }
      }
      errors[ri].push_back(std::isinf(p) ? acc : std::pow(acc, 1.0 / p));
    }
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t pi = 0; pi < p_norms.size(); ++pi) {
    for (std::size_t ri = 0; ri < resolutions.size(); ++ri) {
      ConvergenceRow row;
      row.n = resolutions[ri];
      row.p = p_norms[pi];
      row.error = errors[ri][pi];
      row.order = ri == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : std::log2(errors[ri - 1][pi] / errors[ri][pi]) /
                                std::log2(static_cast<double>(resolutions[ri]) / resolutions[ri - 1]);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace guidefill
