#include <gtest/gtest.h>

#include <json.hpp>

#include "generators.hpp"
#include "guidefill/guide.hpp"
#include "guidefill/harness.hpp"
#include "guidefill/tools/pipeline.hpp"

using namespace guidefill;
using namespace guidefill::tools;
using guidefill::testing::Rng;

TEST(Pipeline, ParsesAssignments) {
  const PipelineOptions o =
      parse_params({"preset=coherence", "r=5", "mu=inf", "order=onion", "neighborhood=rotated", "eta=2.5",
                    "tracked=false"});
  EXPECT_EQ(o.fill.r, 5);
  EXPECT_TRUE(std::isinf(o.fill.mu));
  EXPECT_EQ(o.fill.order, FillOrder::kOnion);
  EXPECT_EQ(o.fill.neighborhood, Neighborhood::kRotatedBall);
  EXPECT_EQ(o.fill.g_source, coherence_transport_params().g_source);
  EXPECT_DOUBLE_EQ(o.eta, 2.5);
  EXPECT_FALSE(o.fill.tracked);
}

TEST(Pipeline, RejectsBadAssignments) {
  for (const char* bad : {"r", "=3", "r=2.5", "r=0", "mu=abc", "order=spiral", "guide=magic", "nope=1",
                          "eta=0", "tracked=maybe", "preset=other"}) {
    try {
      parse_params({bad});
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument) << bad;
    }
  }
  // Parses but fails validation.
  EXPECT_THROW(parse_params({"mu=-1"}), Error);
}

TEST(Pipeline, ParamsJsonRoundTrip) {
  for (int t = 0; t < 50; ++t) {
    Rng rng(2100 + t);
    PipelineOptions o;
    o.fill.r = rng.uniform_int(1, 9);
    o.fill.mu = rng.coin(0.2) ? kInfiniteMu : rng.uniform(0.0, 100.0);
    o.fill.c = rng.uniform(0.0, 1.0);
    o.fill.order = rng.coin() ? FillOrder::kOnion : FillOrder::kSmart;
    o.fill.neighborhood = rng.coin() ? Neighborhood::kAxisBall : Neighborhood::kRotatedBall;
    o.fill.fixed_g = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    o.fill.sigma = rng.uniform(0.5, 3.0);
    o.eta = rng.uniform(0.5, 6.0);
    o.fill.tracked = rng.coin();
    const std::string text = params_to_json(o);
    PipelineOptions back = parse_params({"preset=telea"});
    apply_params_json(back, text);
    EXPECT_EQ(params_to_json(back), text);
  }
}

TEST(Pipeline, JsonPresetAppliesFirst) {
  PipelineOptions o;
  // Key order in the object must not matter.
  apply_params_json(o, R"({"r": 7, "preset": "telea"})");
  EXPECT_EQ(o.fill.r, 7);
  EXPECT_EQ(o.fill.mu, telea_params().mu);
  EXPECT_THROW(apply_params_json(o, "[1,2]"), Error);
  EXPECT_THROW(apply_params_json(o, "{"), Error);
  EXPECT_THROW(apply_params_json(o, R"({"r": [1]})"), Error);
}

TEST(Pipeline, ZeroSplinesMatchZeroGuide) {
  Rng rng(2200);
  const ImageBuffer img = guidefill::testing::random_image(rng, 30, 24, 3);
  const LabelMask m = guidefill::testing::surrounded_mask(rng, 30, 24);
  PipelineOptions o;
  const std::vector<Spline> none;
  const PipelineOutput a = run_pipeline(img, m, &none, o);
  const FillResult b = inpaint(img, m, build_guide_field({}, m, o.eta), o.fill);
  EXPECT_EQ(a.fill.image, b.image);
  EXPECT_FALSE(a.detected);
}

TEST(Pipeline, DetectsWhenNoSplinesGiven) {
  const EdgeScene s = make_edge_scene();
  const PipelineOutput out = run_pipeline(s.image, s.mask, nullptr, PipelineOptions{});
  EXPECT_TRUE(out.detected);
  EXPECT_EQ(out.splines.size(), 1u);
  EXPECT_EQ(out.fill.report.unfillable_pixels, 0u);
}

TEST(Pipeline, ReportJson) {
  FillReport r;
  r.inpaint_pixels = 14;
  r.iterations.push_back({10, 20, 20, 10, false, 0.0});
  r.iterations.push_back({4, 7, 7, 4, true, 0.0});
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j["iterations"], 2);
  EXPECT_EQ(j["threads_max"], 20);
  EXPECT_EQ(j["per_iteration"][1]["forced"], true);
  EXPECT_EQ(j["per_iteration"][0]["candidates"], 20);
}
