#pragma once

#include <functional>
#include <vector>

#include "guidefill/grid.hpp"

// Continuum-limit predictions. Vectors here use the math frame (e2 points up,
// into the inpainting domain); the known half-plane lies below.
namespace guidefill {

enum class BallKind { kAxis, kRotated };

struct HalfBallSet {
  BallKind kind = BallKind::kAxis;
  int r = 0;
  Vec2 g;
  std::vector<Vec2> points;
};

// Axis: {(n, m) : n^2 + m^2 <= r^2, m <= -1}. Rotated: {n g^ + m g^_perp :
// n^2 + m^2 <= r^2, e2 component <= -1}; equal to the axis set when g = 0.
HalfBallSet half_ball(BallKind kind, int r, Vec2 g);

struct LimitPrediction {
  Vec2 g_star;
  double theta_star = 0.0;  // radians in (0, pi)
};

// Weighted center of mass of the half-ball. g is normalized first; mu may be
// kInfiniteMu (argmin set, 1/|y| weights). kEmptySet for an empty half-ball.
LimitPrediction limit_direction(BallKind kind, int r, double mu, Vec2 g);

// Angle in (0, pi) of -v for a v pointing into the lower half-plane.
double transport_angle(Vec2 g_star);

struct CurvePoint {
  double theta_deg = 0.0;
  double theta_star_deg = 0.0;
};

// samples angles theta_k = 180 k / (samples + 1), k = 1..samples.
std::vector<CurvePoint> theta_star_curve(BallKind kind, int r, double mu, int samples);

// Same center of mass over the continuous unit half-disk with eps = 1,
// integrated in polar form (analytic in the radius, adaptive Gauss-Kronrod in
// the angle). kQuadratureFailure if the relative error estimate exceeds 1e-6.
LimitPrediction marz_limit_direction(double mu, Vec2 g);

using Trace = std::function<double(double)>;

// u0(x - cot(theta*) y mod 1).
double weak_solution(const Trace& u0, double theta_star, double x, double y);

struct ConvergenceRow {
  int n = 0;
  double p = 0.0;  // +inf for the max norm
  double error = 0.0;
  double order = 0.0;  // NaN for the coarsest resolution
};

struct ConvergenceSetup {
  Trace u0;
  BallKind kind = BallKind::kRotated;
  int r = 3;
  double mu = 50.0;
  Vec2 g{0.0, 1.0};  // math frame
};

// Periodic-in-x domain of N columns: the top N rows are inpainted, the r + 2
// rows below carry the weak solution. Onion order with fixed g. Errors are
// discrete L^p norms with h^2 weights; orders are log2 ratios of successive
// resolutions.
std::vector<ConvergenceRow> convergence_study(const ConvergenceSetup& setup,
                                              const std::vector<int>& resolutions,
                                              const std::vector<double>& p_norms);

}  // namespace guidefill
