#include "guidefill/spline.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace guidefill {

using nlohmann::json;

void validate_spline(const Spline& spline) {
  if (spline.points.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "spline '" + spline.id + "' needs >= 2 points");
  }
  if (spline.kind == SplineKind::kBezier && (spline.points.size() - 1) % 3 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "bezier spline '" + spline.id + "' needs 3k+1 control points");
  }
  for (std::size_t k = 0; k < spline.points.size(); ++k) {
    const Vec2 p = spline.points[k];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kInvalidArgument, "spline '" + spline.id + "' has a non-finite point");
    }
    if (k > 0 && p == spline.points[k - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "spline '" + spline.id + "' has coincident consecutive points");
    }
  }
  const double len = norm(spline.direction);
  if (!std::isfinite(len) || len > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "spline '" + spline.id + "' direction must have norm <= 1");
  }
}

namespace {

double segment_flatness(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 p3) {
  return std::max(point_segment_distance(p1, p0, p3), point_segment_distance(p2, p0, p3));
}

void flatten_cubic(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 p3, double tol, int depth,
                   std::vector<Vec2>& out) {
  if (depth >= 24 || segment_flatness(p0, p1, p2, p3) <= tol) {
    out.push_back(p3);
    return;
  }
  // de Casteljau split at t = 1/2.
  const Vec2 p01 = 0.5 * (p0 + p1);
  const Vec2 p12 = 0.5 * (p1 + p2);
  const Vec2 p23 = 0.5 * (p2 + p3);
  const Vec2 p012 = 0.5 * (p01 + p12);
  const Vec2 p123 = 0.5 * (p12 + p23);
  const Vec2 mid = 0.5 * (p012 + p123);
  flatten_cubic(p0, p01, p012, mid, tol, depth + 1, out);
  flatten_cubic(mid, p123, p23, p3, tol, depth + 1, out);
}

}  // namespace

std::vector<Vec2> flatten(const Spline& spline, double tolerance) {
  if (spline.kind == SplineKind::kPolyline) return spline.points;
  std::vector<Vec2> out{spline.points.front()};
  for (std::size_t k = 0; k + 3 < spline.points.size(); k += 3) {
    flatten_cubic(spline.points[k], spline.points[k + 1], spline.points[k + 2],
                  spline.points[k + 3], tolerance, 0, out);
  }
  return out;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double point_polyline_distance(Vec2 p, const std::vector<Vec2>& polyline) {
  if (polyline.empty()) return std::numeric_limits<double>::infinity();
  if (polyline.size() == 1) return norm(p - polyline.front());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    best = std::min(best, point_segment_distance(p, polyline[k], polyline[k + 1]));
  }
  return best;
}

std::string splines_to_json(const std::vector<Spline>& splines) {
  json doc;
  doc["version"] = kSplineFormatVersion;
  doc["splines"] = json::array();
  for (const Spline& s : splines) {
    json js;
    js["id"] = s.id;
    js["source"] = s.source == SplineSource::kAuto ? "auto" : "user";
    js["direction"] = {s.direction.x, s.direction.y};
    json pts = json::array();
    for (const Vec2& p : s.points) pts.push_back({p.x, p.y});
    js["points"] = std::move(pts);
    if (s.kind == SplineKind::kBezier) js["kind"] = "bezier";
    doc["splines"].push_back(std::move(js));
  }
  return doc.dump();
}

namespace {

Vec2 parse_vec2(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Spline> parse_splines(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("spline JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer()) {
    throw Error(ErrorCode::kInvalidArgument, "spline JSON: missing integer 'version'");
  }
  if (doc["version"].get<int>() != kSplineFormatVersion) {
    throw Error(ErrorCode::kInvalidArgument, "spline JSON: unsupported version");
  }
  if (!doc.contains("splines") || !doc["splines"].is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "spline JSON: 'splines' must be an array");
  }
  std::vector<Spline> out;
  for (const json& js : doc["splines"]) {
    if (!js.is_object()) throw Error(ErrorCode::kInvalidArgument, "spline JSON: entry must be an object");
    Spline s;
    if (!js.contains("id") || !js["id"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "spline JSON: 'id' must be a string");
    }
    s.id = js["id"].get<std::string>();
    const std::string source = js.value("source", std::string("user"));
    if (source == "auto") {
      s.source = SplineSource::kAuto;
    } else if (source == "user") {
      s.source = SplineSource::kUser;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "spline JSON: source must be auto or user");
    }
    const std::string kind = js.value("kind", std::string("polyline"));
    if (kind == "bezier") {
      s.kind = SplineKind::kBezier;
    } else if (kind != "polyline") {
      throw Error(ErrorCode::kInvalidArgument, "spline JSON: kind must be polyline or bezier");
    }
    if (!js.contains("direction")) {
      throw Error(ErrorCode::kInvalidArgument, "spline JSON: missing 'direction'");
    }
    s.direction = parse_vec2(js["direction"], "direction");
    if (!js.contains("points") || !js["points"].is_array()) {
      throw Error(ErrorCode::kInvalidArgument, "spline JSON: 'points' must be an array");
    }
    for (const json& p : js["points"]) s.points.push_back(parse_vec2(p, "point"));
    validate_spline(s);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<Spline> splines_from_json(std::string_view text) {
  try {
    return parse_splines(text);
  } catch (const json::exception& e) {
    // wrong value types surface here
    throw Error(ErrorCode::kInvalidArgument, std::string("spline JSON: ") + e.what());
  }
}

}  // namespace guidefill
