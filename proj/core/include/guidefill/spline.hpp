#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "guidefill/grid.hpp"

namespace guidefill {

enum class SplineSource { kAuto, kUser };
enum class SplineKind { kPolyline, kBezier };

// An edge carried into the inpainting domain. `direction` is the coherence
// weighted guide vector (|direction| <= 1). Bezier splines hold 3k+1 control
// points (on-curve, handle, handle, on-curve, ...).
struct Spline {
  std::string id;
  SplineSource source = SplineSource::kAuto;
  SplineKind kind = SplineKind::kPolyline;
  Vec2 direction;
  std::vector<Vec2> points;

  bool operator==(const Spline&) const = default;
};

// Rejects fewer than two points, coincident consecutive points, non-finite
// values, malformed Bezier point counts and |direction| > 1.
void validate_spline(const Spline& spline);

// Bezier splines flattened to within `tolerance` px; polylines returned as is.
std::vector<Vec2> flatten(const Spline& spline, double tolerance = 0.25);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double point_polyline_distance(Vec2 p, const std::vector<Vec2>& polyline);

// JSON document {version, splines:[{id, source, direction, points[, kind]}]}.
inline constexpr int kSplineFormatVersion = 1;
std::string splines_to_json(const std::vector<Spline>& splines);
// Throws Error(kInvalidArgument) on malformed input.
std::vector<Spline> splines_from_json(std::string_view text);

}  // namespace guidefill
