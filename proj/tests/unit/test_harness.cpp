#include <gtest/gtest.h>

#include <cmath>
#include <regex>

#include "guidefill/harness.hpp"

using namespace guidefill;

TEST(Harness, PixelCentersAreCellMidpoints) {
  const SyntheticProblem s = degradation_problem(200, 100);
  const Vec2 c = pixel_center(s, 0, 0);
  EXPECT_DOUBLE_EQ(c.x, -1.0 + 0.005);
  EXPECT_DOUBLE_EQ(c.y, 0.5 - 0.005);
  const Vec2 last = pixel_center(s, 199, 99);
  EXPECT_NEAR(last.x, 1.0 - 0.005, 1e-12);
  EXPECT_NEAR(last.y, -0.5 + 0.005, 1e-12);
}

TEST(Harness, RenderMarksDomainAndBand) {
  const SyntheticProblem s = stripe_problem(400);
  const RenderedProblem p = render_problem(s);
  ASSERT_EQ(p.mask.width(), 400);
  ASSERT_EQ(p.mask.height(), 100);
  for (int j = 0; j < 100; ++j) {
    for (int i = 0; i < 400; ++i) {
      const Vec2 c = pixel_center(s, i, j);
      const bool in_d = c.x >= 0.4 && c.x <= 3.96 && c.y >= 0.2 && c.y <= 0.8;
      ASSERT_EQ(p.mask.at(i, j) == Label::kInpaint, in_d) << i << "," << j;
      const float band = std::abs(c.y - 0.5) <= 0.05 + 1e-9 ? 1.0f : 0.0f;
      ASSERT_EQ(p.truth.at(i, j, 0), band);
      ASSERT_EQ(p.image.at(i, j, 0), in_d ? 0.0f : band);
    }
  }
}

TEST(Harness, RenderRejectsBadSpecs) {
  SyntheticProblem s = stripe_problem(100);
  s.domain.x1 = 4.0;  // touches the image edge
  try {
    render_problem(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpecError);
  }
  s = stripe_problem(100);
  s.half_width = 0.0;
  EXPECT_THROW(render_problem(s), Error);
  s = stripe_problem(100);
  s.width = 0;
  EXPECT_THROW(render_problem(s), Error);
}

TEST(Harness, PowerLawFitRecoversExactData) {
  std::vector<std::pair<double, double>> pts;
  for (double n : {1e2, 1e3, 1e4, 1e5}) pts.emplace_back(n, 3.0 * std::pow(n, 0.5));
  const PowerLawFit f = fit_power_law(pts);
  EXPECT_NEAR(f.alpha, 0.5, 1e-12);
  EXPECT_NEAR(f.a, 3.0, 1e-9);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
  try {
    fit_power_law({{10.0, 1.0}, {10.0, 2.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateFit);
  }
  EXPECT_THROW(fit_power_law({{10.0, 1.0}}), Error);
  EXPECT_THROW(fit_power_law({{10.0, -1.0}, {20.0, 1.0}}), Error);
}

TEST(Harness, TransitionWidth) {
  EXPECT_EQ(transition_width_samples({0, 0, 0.05, 0.5, 0.95, 1, 1}), 2);
  EXPECT_EQ(transition_width_samples({0, 0, 1, 1}), 1);
  EXPECT_EQ(transition_width_samples({0, 0.2, 0.4, 0.6, 0.8, 1.0}), 5);
  EXPECT_EQ(transition_width_samples({1, 1, 1}), 0);
  EXPECT_EQ(transition_width_samples({}), 0);
}

TEST(Harness, StripeIterationsMatchShellCount) {
  const auto rows = scaling_study({120, 200}, true);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.iterations, r.analytic_iterations);
    EXPECT_GT(r.n, 0u);
    EXPECT_GE(r.threads_max, 1u);
  }
  const auto untracked = scaling_study({120}, false);
  EXPECT_EQ(untracked[0].threads_max, static_cast<std::size_t>(120 * 30));
  EXPECT_EQ(untracked[0].iterations, rows[0].iterations);
}

TEST(Harness, KinkingProblemLayout) {
  const KinkingProblem k = make_kinking_problem(64, 73.0, 10);
  EXPECT_EQ(k.mask.count(Label::kInpaint), 64u * 54u);
  EXPECT_TRUE(k.mask.periodic_x());
  // Paint the exact continuation into the hole; the measured angle is the
  // pattern's own.
  ImageBuffer exact = k.image;
  const double cot = std::cos(73.0 * M_PI / 180.0) / std::sin(73.0 * M_PI / 180.0);
  for (int j = 0; j < 54; ++j) {
    for (int i = 0; i < 64; ++i) {
      double s = (i - cot * (54 - j)) / 64.0;
      s -= std::floor(s);
      exact.at(i, j, 0) = (s >= 0.25 && s < 0.75) ? 1.0f : 0.0f;
    }
  }
  EXPECT_NEAR(measure_edge_angle(exact, 10), 73.0, 1.0);
  EXPECT_THROW(measure_edge_angle(k.image, 10), Error);
}

TEST(Harness, ShockSceneMeasuresMidline) {
  ShockScene s = make_shock_scene(40, 20, 10, 29);
  EXPECT_EQ(s.mask.count(Label::kInpaint), 20u * 20u);
  // Pretend fill: sharp jump between columns 19 and 20.
  for (int j = 0; j < 20; ++j) {
    for (int i = 10; i < 30; ++i) {
      s.image.at(i, j, 0) = i < 20 ? 1.0f : 0.0f;
      s.image.at(i, j, 1) = i < 20 ? 0.0f : 1.0f;
    }
  }
  const ShockMeasure m = measure_shock(s.image, 10, 29);
  EXPECT_EQ(m.column, 19);
  EXPECT_GT(m.peak, 0.0);
  EXPECT_EQ(m.runner_up, 0.0);
}

TEST(Harness, StudyPathsAndScripts) {
  const auto p = study_csv_path("/tmp/x", "scale_tracked");
  EXPECT_TRUE(std::regex_match(p.filename().string(), std::regex(R"(scale_tracked_\d{8}T\d{6}\.csv)")))
      << p;
  const std::string gp = gnuplot_script(p, 3, 5, "t");
  EXPECT_NE(gp.find("using 3:5"), std::string::npos);
  EXPECT_NE(gp.find(p.filename().string()), std::string::npos);
}
