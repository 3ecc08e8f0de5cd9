#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "generators.hpp"
#include "guidefill/spline.hpp"

using namespace guidefill;
using guidefill::testing::Rng;

namespace {

Vec2 cubic(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 p3, double t) {
  const double u = 1.0 - t;
  return (u * u * u) * p0 + (3 * u * u * t) * p1 + (3 * u * t * t) * p2 + (t * t * t) * p3;
}

ErrorCode parse_error(const std::string& text) {
  try {
    splines_from_json(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kSpecError;  // sentinel: no error
}

}  // namespace

TEST(Spline, JsonRoundTripProperty) {
  for (int t = 0; t < 100; ++t) {
    Rng rng(300 + t);
    std::vector<Spline> in;
    const int n = rng.uniform_int(0, 5);
    for (int k = 0; k < n; ++k) in.push_back(guidefill::testing::random_spline(rng, k));
    const std::string text = splines_to_json(in);
    const auto out = splines_from_json(text);
    EXPECT_EQ(out, in) << "case " << t;
    EXPECT_EQ(splines_to_json(out), text) << "case " << t;
  }
}

TEST(Spline, JsonShape) {
  Spline s{"a", SplineSource::kUser, SplineKind::kPolyline, {0.5, 0.0}, {{1, 2}, {3, 4}}};
  EXPECT_EQ(splines_to_json({s}),
            R"({"splines":[{"direction":[0.5,0.0],"id":"a","points":[[1.0,2.0],[3.0,4.0]],"source":"user"}],"version":1})");
  s.kind = SplineKind::kBezier;
  s.points = {{0, 0}, {1, 1}, {2, 1}, {3, 0}};
  EXPECT_NE(splines_to_json({s}).find(R"("kind":"bezier")"), std::string::npos);
}

TEST(Spline, SourceDefaultsToUser) {
  const auto s = splines_from_json(R"({"version":1,"splines":[{"id":"x","direction":[0,1],"points":[[0,0],[1,1]]}]})");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].source, SplineSource::kUser);
  EXPECT_EQ(s[0].kind, SplineKind::kPolyline);
}

TEST(Spline, MalformedJsonIsInvalidArgument) {
  const char* bad[] = {
      "{",
      "[]",
      R"({"splines":[]})",
      R"({"version":2,"splines":[]})",
      R"({"version":1})",
      R"({"version":1,"splines":[1]})",
      R"({"version":1,"splines":[{"direction":[0,0],"points":[[0,0],[1,1]]}]})",
      R"({"version":1,"splines":[{"id":"a","points":[[0,0],[1,1]]}]})",
      R"({"version":1,"splines":[{"id":"a","direction":[0,0],"points":[[0,0]]}]})",
      R"({"version":1,"splines":[{"id":"a","direction":[0,0],"points":[[0,0],[0,0]]}]})",
      R"({"version":1,"splines":[{"id":"a","direction":[2,0],"points":[[0,0],[1,1]]}]})",
      R"({"version":1,"splines":[{"id":"a","direction":[0,0],"points":[[0,0],[1,1]],"kind":"bezier"}]})",
      R"({"version":1,"splines":[{"id":"a","direction":[0,0],"points":[[0,0],[1,1]],"kind":"nurbs"}]})",
      R"({"version":1,"splines":[{"id":"a","direction":[0,0],"points":[[0,0],[1,1]],"source":7}]})",
      R"({"version":1,"splines":[{"id":"a","direction":[0,0],"points":[[0,"x"],[1,1]]}]})",
  };
  for (const char* text : bad) EXPECT_EQ(parse_error(text), ErrorCode::kInvalidArgument) << text;
  EXPECT_EQ(parse_error(R"({"version":1,"splines":[]})"), ErrorCode::kSpecError);
}

TEST(Spline, SegmentDistanceOracle) {
  EXPECT_DOUBLE_EQ(point_segment_distance({0, 1}, {-1, 0}, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({3, 4}, {0, 0}, {0, 0}), 5.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({5, 0}, {0, 0}, {2, 0}), 3.0);
  EXPECT_EQ(point_polyline_distance({0, 0}, {}), std::numeric_limits<double>::infinity());
  // Dense sampling oracle.
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const Vec2 a{rng.uniform(-5, 5), rng.uniform(-5, 5)}, b{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vec2 p{rng.uniform(-8, 8), rng.uniform(-8, 8)};
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 20000; ++k) best = std::min(best, norm(p - (a + (k / 20000.0) * (b - a))));
    EXPECT_NEAR(point_segment_distance(p, a, b), best, 1e-3);
  }
}

TEST(Spline, BezierFlatteningStaysWithinTolerance) {
  for (int t = 0; t < 50; ++t) {
    Rng rng(600 + t);
    Spline s = guidefill::testing::random_spline(rng, 0);
    s.kind = SplineKind::kBezier;
    s.points.resize(4);
    const double tol = 0.25;
    const auto flat = flatten(s, tol);
    EXPECT_EQ(flat.front(), s.points.front());
    EXPECT_EQ(flat.back(), s.points.back());
    for (int k = 0; k <= 400; ++k) {
      const Vec2 q = cubic(s.points[0], s.points[1], s.points[2], s.points[3], k / 400.0);
      EXPECT_LE(point_polyline_distance(q, flat), tol + 1e-9) << "case " << t;
    }
  }
}

TEST(Spline, PolylineFlattensToItself) {
  Spline s{"p", SplineSource::kAuto, SplineKind::kPolyline, {}, {{0, 0}, {1, 0}, {1, 5}}};
  EXPECT_EQ(flatten(s), s.points);
}
