#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "generators.hpp"
#include "guidefill/engine.hpp"
#include "guidefill/parallel.hpp"

using namespace guidefill;
using guidefill::testing::Rng;

namespace {

// Axis-ball oracle: offsets are integers, so ghost points are pixels.
struct Brute {
  double value = 0.0;
  double conf = 0.0;
  bool any = false;
};

Brute brute_axis(const ImageBuffer& img, const LabelMask& m, PixelCoord x, int r, double mu, Vec2 g) {
  double num = 0.0, mass = 0.0, total = 0.0;
  for (int b = -r; b <= r; ++b) {
    for (int a = -r; a <= r; ++a) {
      if ((a == 0 && b == 0) || a * a + b * b > r * r) continue;
      const double len = std::hypot(a, b);
      const double along = -g.y * a + g.x * b;
      const double w = std::exp(-mu * mu / (2.0 * r * r) * along * along) / len;
      total += w;
      const int i = x.i + a, j = x.j + b;
      if (i < 0 || j < 0 || i >= m.width() || j >= m.height() || !m.readable(i, j)) continue;
      num += w * img.at(i, j, 0);
      mass += w;
    }
  }
  Brute out;
  out.any = mass > 0.0;
  if (out.any) out.value = num / mass;
  out.conf = mass / total;
  return out;
}

FillParams axis_params(double mu) {
  FillParams p;
  p.neighborhood = Neighborhood::kAxisBall;
  p.g_source = GuideSource::kFixed;
  p.mu = mu;
  return p;
}

}  // namespace

TEST(Engine, WeightFormula) {
  EXPECT_DOUBLE_EQ(weight({0, 0}, {3, 4}, {0, 0}, 50.0, 3.0), 0.2);
  const double w = weight({1, 1}, {2, 3}, {1, 0}, 2.0, 3.0);
  // g_perp = (0, 1), d = (1, 2): exp(-4/18 * 4) / sqrt 5
  EXPECT_NEAR(w, std::exp(-16.0 / 18.0) / std::sqrt(5.0), 1e-15);
  EXPECT_THROW(weight({1, 1}, {1, 1}, {1, 0}, 2.0, 3.0), Error);
}

TEST(Engine, FillColorMatchesAxisOracle) {
  for (int t = 0; t < 40; ++t) {
    Rng rng(900 + t);
    const int w = rng.uniform_int(8, 24), h = rng.uniform_int(8, 24);
    const ImageBuffer img = guidefill::testing::random_image(rng, w, h, 1);
    const LabelMask m = guidefill::testing::random_mask(rng, w, h);
    const double mu = rng.uniform(0.0, 20.0);
    FillParams p = axis_params(mu);
    p.r = rng.uniform_int(1, 5);
    const double a = rng.uniform(0.0, 6.3), s = rng.uniform(0.0, 1.0);
    const Vec2 g{s * std::cos(a), s * std::sin(a)};
    for (int k = 0; k < 10; ++k) {
      const PixelCoord x{rng.uniform_int(0, w - 1), rng.uniform_int(0, h - 1)};
      const Brute want = brute_axis(img, m, x, p.r, mu, g);
      const auto got = fill_color(x, img, m, p, g);
      ASSERT_EQ(got.has_value(), want.any);
      if (want.any) {
        EXPECT_NEAR((*got)[0], want.value, 1e-12);
      }
      EXPECT_NEAR(confidence(x, img, m, p, g), want.conf, 1e-12);
    }
  }
}

TEST(Engine, InfiniteMuRestrictsToTheLine) {
  // g along +x: the argmin set is the horizontal row through x.
  ImageBuffer img(9, 9, 1);
  LabelMask m(9, 9);
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 9; ++i) img.at(i, j, 0) = static_cast<float>(j == 4 ? (i < 4 ? 1.0 : 0.5) : 9.0);
  }
  const FillParams p = axis_params(kInfiniteMu);
  // Three row members per side with equal 1/|d| masses: the plain mean.
  const double want = 0.75;
  ASSERT_TRUE(fill_color({4, 4}, img, m, p, {1.0, 0.0}).has_value());
  EXPECT_NEAR((*fill_color({4, 4}, img, m, p, {1.0, 0.0}))[0], want, 1e-7);
  EXPECT_DOUBLE_EQ(confidence({4, 4}, img, m, p, {1.0, 0.0}), 1.0);
  // Block the left half of the line: confidence is the remaining share.
  m.set(3, 4, Label::kInpaint);
  m.set(2, 4, Label::kInpaint);
  m.set(1, 4, Label::kInpaint);
  EXPECT_NEAR(confidence({4, 4}, img, m, p, {1.0, 0.0}), 0.5, 1e-12);
  // With the whole line blocked the pixel still gets a color from the next
  // best members, but zero confidence.
  for (int i = 5; i <= 7; ++i) m.set(i, 4, Label::kInpaint);
  EXPECT_TRUE(fill_color({4, 4}, img, m, p, {1.0, 0.0}).has_value());
  EXPECT_EQ(confidence({4, 4}, img, m, p, {1.0, 0.0}), 0.0);
}

TEST(Engine, LargeMuDoesNotUnderflow) {
  ImageBuffer img(11, 11, 1, 0.25f);
  LabelMask m(11, 11, Label::kInpaint);
  m.set(7, 3, Label::kReadable);  // 2 px off the line through (5, 5) along x
  const FillParams p = axis_params(1e4);
  const auto c = fill_color({5, 5}, img, m, p, {1.0, 0.0});
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR((*c)[0], 0.25, 1e-7);
}

TEST(Engine, ValidateRejectsBadParams) {
  FillParams p;
  p.r = 0;
  EXPECT_THROW(validate(p), Error);
  p = {};
  p.mu = -1;
  EXPECT_THROW(validate(p), Error);
  p = {};
  p.mu = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(validate(p), Error);
  p = {};
  p.c = 1.0;
  EXPECT_THROW(validate(p), Error);
  EXPECT_NO_THROW(validate(guidefill_params()));
  EXPECT_NO_THROW(validate(coherence_transport_params()));
  EXPECT_NO_THROW(validate(telea_params()));
}

TEST(Engine, ReadyRules) {
  FillParams p;
  p.order = FillOrder::kOnion;
  EXPECT_TRUE(ready(0.0, 0.0, p, false));
  p.order = FillOrder::kSmart;
  p.c = 0.5;
  EXPECT_FALSE(ready(0.5, 1.0, p, false));
  EXPECT_TRUE(ready(0.51, 0.0, p, false));
  p.order = FillOrder::kSmartWithDataTerm;
  p.c2 = 0.2;
  EXPECT_FALSE(ready(0.9, 0.1, p, true));
  EXPECT_TRUE(ready(0.9, 0.3, p, true));
  EXPECT_TRUE(ready(0.9, 0.1, p, false));
}

TEST(Engine, OnionIterationsOnSquareHole) {
  for (int n : {1, 2, 5, 8, 13}) {
    ImageBuffer img(n + 10, n + 10, 1, 0.5f);
    LabelMask m(n + 10, n + 10);
    for (int j = 5; j < 5 + n; ++j) {
      for (int i = 5; i < 5 + n; ++i) m.set(i, j, Label::kInpaint);
    }
    const FillResult res = inpaint(img, m, telea_params());
    EXPECT_EQ(res.report.iteration_count(), static_cast<std::size_t>((n + 1) / 2)) << n;
    EXPECT_EQ(res.mask.count(Label::kInpaint), 0u);
    for (float v : res.image.values()) EXPECT_FLOAT_EQ(v, 0.5f);
  }
}

TEST(Engine, FillIsConvexCombinationProperty) {
  for (int t = 0; t < 25; ++t) {
    Rng rng(1100 + t);
    const int w = rng.uniform_int(6, 30), h = rng.uniform_int(6, 30);
    const ImageBuffer img = guidefill::testing::random_image(rng, w, h, 2);
    const LabelMask m = guidefill::testing::random_mask(rng, w, h);
    if (m.count(Label::kReadable) == 0) continue;
    FillParams p = axis_params(rng.uniform(0.0, 60.0));
    p.neighborhood = rng.coin() ? Neighborhood::kAxisBall : Neighborhood::kRotatedBall;
    p.order = rng.coin() ? FillOrder::kOnion : FillOrder::kSmart;
    p.fixed_g = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    float lo[2] = {2.0f, 2.0f}, hi[2] = {-1.0f, -1.0f};
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (!m.readable(i, j)) continue;
        for (int c = 0; c < 2; ++c) lo[c] = std::min(lo[c], img.at(i, j, c)), hi[c] = std::max(hi[c], img.at(i, j, c));
      }
    }
    const FillResult res = inpaint(img, m, p);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (m.at(i, j) == Label::kInpaint) {
          EXPECT_EQ(res.mask.at(i, j), Label::kReadable);
          for (int c = 0; c < 2; ++c) {
            EXPECT_GE(res.image.at(i, j, c), lo[c] - 1e-6f);
            EXPECT_LE(res.image.at(i, j, c), hi[c] + 1e-6f);
          }
        } else {
          EXPECT_EQ(res.mask.at(i, j), m.at(i, j));
          for (int c = 0; c < 2; ++c) EXPECT_EQ(res.image.at(i, j, c), img.at(i, j, c));
        }
      }
    }
  }
}

TEST(Engine, BystanderPixelsAreNeverRead) {
  for (int t = 0; t < 20; ++t) {
    Rng rng(1200 + t);
    const int w = rng.uniform_int(6, 30), h = rng.uniform_int(6, 30);
    ImageBuffer img = guidefill::testing::random_image(rng, w, h, 1);
    const LabelMask m = guidefill::testing::random_mask(rng, w, h);
    FillParams p = guidefill_params();
    p.g_source = GuideSource::kFixed;
    p.fixed_g = {0.6, 0.3};
    const FillResult a = inpaint(img, m, p);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (m.at(i, j) != Label::kReadable) img.at(i, j, 0) = static_cast<float>(rng.uniform(5, 6));
      }
    }
    const FillResult b = inpaint(img, m, p);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (m.at(i, j) == Label::kInpaint) {
          ASSERT_EQ(a.image.at(i, j, 0), b.image.at(i, j, 0)) << t;
        }
      }
    }
  }
}

TEST(Engine, ResultIndependentOfWorkerCount) {
  Rng rng(77);
  const ImageBuffer img = guidefill::testing::random_image(rng, 64, 48, 3);
  const LabelMask m = guidefill::testing::random_mask(rng, 64, 48);
  FillParams p = coherence_transport_params();
  set_worker_count(1);
  const FillResult a = inpaint(img, m, p);
  set_worker_count(4);
  const FillResult b = inpaint(img, m, p);
  set_worker_count(0);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.report.iteration_count(), b.report.iteration_count());
}

TEST(Engine, UnreachableRegionFallsBackToNearestColor) {
  ImageBuffer img(12, 5, 1, 0.0f);
  LabelMask m(12, 5);
  for (int j = 0; j < 5; ++j) img.at(0, j, 0) = 0.75f;
  // Bystander wall at column 4 cuts off the Inpaint pixels to its right.
  for (int j = 0; j < 5; ++j) {
    m.set(4, j, Label::kBystander);
    for (int i = 5; i < 12; ++i) m.set(i, j, Label::kInpaint);
  }
  for (int j = 0; j < 5; ++j) {
    for (int i = 1; i < 4; ++i) img.at(i, j, 0) = 0.25f;
  }
  const FillResult res = inpaint(img, m, telea_params());
  EXPECT_EQ(res.report.unfillable_pixels, 35u);
  EXPECT_EQ(res.mask.count(Label::kInpaint), 0u);
  EXPECT_FLOAT_EQ(res.image.at(11, 2, 0), 0.25f);
}

TEST(Engine, DeadlockGuardForcesProgress) {
  Rng rng(5);
  const ImageBuffer img = guidefill::testing::random_image(rng, 30, 30, 1);
  LabelMask m(30, 30);
  for (int j = 8; j < 22; ++j) {
    for (int i = 8; i < 22; ++i) m.set(i, j, Label::kInpaint);
  }
  FillParams p = guidefill_params();
  p.g_source = GuideSource::kFixed;
  p.c = 0.99;
  const FillResult res = inpaint(img, m, p);
  EXPECT_GT(res.report.forced_fills, 0u);
  EXPECT_EQ(res.mask.count(Label::kInpaint), 0u);
}

TEST(Engine, DataTermPhaseDefersWeakGuidance) {
  // Left half of the hole has strong g, right half none; while any frontier
  // pixel carries |g| > c2, weak pixels wait.
  ImageBuffer img(40, 20, 1, 0.5f);
  LabelMask m(40, 20);
  GuideField field(40, 20);
  for (int j = 5; j < 15; ++j) {
    for (int i = 5; i < 35; ++i) {
      m.set(i, j, Label::kInpaint);
      if (i < 20) field.at(i, j) = {0.0, 0.9};
    }
  }
  FillParams p = guidefill_params();
  p.order = FillOrder::kSmartWithDataTerm;
  p.c2 = 0.5;
  const FillResult res = inpaint(img, m, field, p);
  ASSERT_FALSE(res.report.iterations.empty());
  FillParams plain = p;
  plain.order = FillOrder::kSmart;
  const FillResult base = inpaint(img, m, field, plain);
  EXPECT_LT(res.report.iterations.front().filled, base.report.iterations.front().filled);
  EXPECT_EQ(res.mask.count(Label::kInpaint), 0u);
}

TEST(Engine, GuideFieldSizeChecked) {
  ImageBuffer img(5, 5, 1);
  LabelMask m(5, 5);
  EXPECT_THROW(inpaint(img, m, GuideField(4, 5), guidefill_params()), Error);
  EXPECT_THROW(inpaint(img, LabelMask(4, 5), guidefill_params()), Error);
}

TEST(Engine, NoInpaintPixelsIsIdentity) {
  Rng rng(1);
  const ImageBuffer img = guidefill::testing::random_image(rng, 5, 5, 1);
  const FillResult res = inpaint(img, LabelMask(5, 5), telea_params());
  EXPECT_EQ(res.image, img);
  EXPECT_EQ(res.report.iteration_count(), 0u);
}
