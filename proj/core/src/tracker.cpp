#include "guidefill/tracker.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "guidefill/parallel.hpp"

namespace guidefill {

FrontierUpdate update_frontier(const PixelSet& frontier, const PixelSet& filled,
                               const LabelMask& mask) {
  const auto w = static_cast<std::uint64_t>(mask.width());
  auto key = [w](int i, int j) { return static_cast<std::uint64_t>(j) * w + static_cast<std::uint64_t>(i); };

  // Map: survivors of the old frontier plus the 8-neighbors of every fill.
  std::vector<std::uint64_t> keys;
  keys.reserve(frontier.size() + 8 * filled.size());
  std::size_t f = 0;
  for (const PixelCoord& p : frontier) {
    while (f < filled.size() && filled[f] < p) ++f;
    if (f < filled.size() && filled[f] == p) continue;
    keys.push_back(key(p.i, p.j));
  }
  for (const PixelCoord& p : filled) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        int ni = p.i + di;
        const int nj = p.j + dj;
        if (!mask.resolve(ni, nj)) continue;
        if (mask.at(ni, nj) == Label::kInpaint) keys.push_back(key(ni, nj));
      }
    }
  }
  FrontierUpdate out;
  out.candidates = keys.size();
  out.threads_requested = std::max(frontier.size(), keys.size());

  // Sort, then flag first occurrences that still pass the active predicate.
  std::sort(keys.begin(), keys.end());
  const std::size_t n = keys.size();
  std::vector<std::uint32_t> flag(n);
  parallel_for(n, [&](std::size_t k) {
    if (k > 0 && keys[k] == keys[k - 1]) return;
    const int i = static_cast<int>(keys[k] % w);
    const int j = static_cast<int>(keys[k] / w);
    flag[k] = is_active(mask, i, j) ? 1u : 0u;
  });
  // Exclusive scan gives each survivor its output slot.
  std::vector<std::uint32_t> slot(n);
  std::exclusive_scan(flag.begin(), flag.end(), slot.begin(), 0u);
  const std::size_t total = n == 0 ? 0 : slot[n - 1] + flag[n - 1];
  out.frontier.resize(total);
  parallel_for(n, [&](std::size_t k) {
    if (!flag[k]) return;
    out.frontier[slot[k]] = {static_cast<int>(keys[k] % w), static_cast<int>(keys[k] / w)};
  });
  return out;
}

FillResult run_tracked(const ImageBuffer& image, const LabelMask& mask, const GuideField& guide,
                       FillParams params) {
  params.tracked = true;
  return inpaint(image, mask, guide, params);
}

FillResult run_tracked(const ImageBuffer& image, const LabelMask& mask, FillParams params) {
  params.tracked = true;
  return inpaint(image, mask, params);
}

void write_work_metrics_csv(std::ostream& out, const FillReport& report) {
  out << "iteration,frontier_size,candidates,threads_requested,filled\n";
  for (std::size_t k = 0; k < report.iterations.size(); ++k) {
    const IterationStats& s = report.iterations[k];
    out << k + 1 << ',' << s.frontier_size << ',' << s.candidates << ',' << s.threads_requested
        << ',' << s.filled << '\n';
  }
}

}  // namespace guidefill
