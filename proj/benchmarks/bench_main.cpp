#include <benchmark/benchmark.h>

#include <numbers>

#include "guidefill/engine.hpp"
#include "guidefill/harness.hpp"
#include "guidefill/limits.hpp"
#include "guidefill/tracker.hpp"

using namespace guidefill;

namespace {

// Stripe family, onion order, g = 0; the counters mirror the scaling study.
void BM_StripeFill(benchmark::State& state) {
  const RenderedProblem p = render_problem(stripe_problem(static_cast<int>(state.range(0))));
  FillParams params;
  params.order = FillOrder::kOnion;
  params.g_source = GuideSource::kFixed;
  params.tracked = state.range(1) != 0;
  std::size_t threads = 0;
  for (auto _ : state) {
    const FillResult r = inpaint(p.image, p.mask, params);
    threads = 0;
    for (const auto& it : r.report.iterations) threads = std::max(threads, it.threads_requested);
    benchmark::DoNotOptimize(r.image.values().data());
  }
  state.counters["N"] = static_cast<double>(p.mask.count(Label::kInpaint));
  state.counters["threads_max"] = static_cast<double>(threads);
}
BENCHMARK(BM_StripeFill)
    ->ArgsProduct({{280, 560, 1120}, {0, 1}})
    ->ArgNames({"W", "tracked"})
    ->Unit(benchmark::kMillisecond);

void BM_UpdateFrontier(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LabelMask start(n, n, Label::kInpaint);
  for (auto _ : state) {
    state.PauseTiming();
    LabelMask m = start;
    for (int i = 0; i < n; ++i) m.set(i, n - 1, Label::kReadable);
    PixelSet frontier = active_boundary(m);
    state.ResumeTiming();
    // Peel rows bottom-up.
    while (!frontier.empty()) {
      for (const auto& p : frontier) m.set(p, Label::kReadable);
      frontier = update_frontier(frontier, frontier, m).frontier;
    }
    benchmark::DoNotOptimize(frontier.data());
  }
}
BENCHMARK(BM_UpdateFrontier)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_LimitDirection(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const double th = 73.0 * std::numbers::pi / 180.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(limit_direction(BallKind::kRotated, r, 50.0, {std::cos(th), std::sin(th)}));
  }
}
BENCHMARK(BM_LimitDirection)->Arg(3)->Arg(10)->Arg(40);

void BM_MarzLimit(benchmark::State& state) {
  const double th = 73.0 * std::numbers::pi / 180.0;
  for (auto _ : state) benchmark::DoNotOptimize(marz_limit_direction(50.0, {std::cos(th), std::sin(th)}));
}
BENCHMARK(BM_MarzLimit);

}  // namespace

BENCHMARK_MAIN();
