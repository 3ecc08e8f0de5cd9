#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "guidefill/engine.hpp"
#include "guidefill/grid.hpp"

namespace guidefill {

struct FrontierUpdate {
  PixelSet frontier;
  std::size_t candidates = 0;
  std::size_t threads_requested = 0;
};

// Next active frontier after `filled` (a sorted subset of `frontier`) has been
// relabelled in `mask`. Runs as map -> sort -> flag -> scan -> compact over
// j*W+i keys; the result is sorted in (j, i) order.
FrontierUpdate update_frontier(const PixelSet& frontier, const PixelSet& filled,
                               const LabelMask& mask);

// inpaint with tracking forced on.
FillResult run_tracked(const ImageBuffer& image, const LabelMask& mask, const GuideField& guide,
                       FillParams params);
FillResult run_tracked(const ImageBuffer& image, const LabelMask& mask, FillParams params);

// CSV with columns iteration,frontier_size,candidates,threads_requested,filled.
void write_work_metrics_csv(std::ostream& out, const FillReport& report);

}  // namespace guidefill
