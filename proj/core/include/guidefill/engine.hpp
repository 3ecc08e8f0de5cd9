#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "guidefill/grid.hpp"
#include "guidefill/guide.hpp"

namespace guidefill {

enum class FillOrder { kOnion, kSmart, kSmartWithDataTerm };
enum class Neighborhood { kAxisBall, kRotatedBall };
enum class GuideSource { kGuideField, kModifiedStructureTensor, kFixed };

inline constexpr double kInfiniteMu = std::numeric_limits<double>::infinity();

struct FillParams {
  int r = 3;
  double mu = 50.0;  // kInfiniteMu selects the argmin-set limit
  double c = 0.05;
  double c2 = 0.0;
  FillOrder order = FillOrder::kSmart;
  Neighborhood neighborhood = Neighborhood::kRotatedBall;
  GuideSource g_source = GuideSource::kGuideField;
  Vec2 fixed_g;
  // Modified structure tensor settings for GuideSource::kModifiedStructureTensor.
  double sigma = 2.0;
  double rho = 4.0;
  double lambda = 1e-5;
  bool tracked = true;
  // Cross-check every tracked frontier against a full scan (kInvariantBreach).
  bool verify_tracking = false;
};

FillParams guidefill_params();
FillParams coherence_transport_params();
FillParams telea_params();
// Throws kInvalidArgument on r < 1, mu < 0 / NaN or c outside [0, 1).
void validate(const FillParams& params);

// (1/|d|) exp(-mu^2/(2 eps^2) (g_perp . d)^2) with d = y - x.
double weight(Vec2 x, Vec2 y, Vec2 g, double mu, double eps);

// Ball offsets (excluding the center) for pixel x, before adding x.
std::vector<Vec2> neighborhood_offsets(const FillParams& params, Vec2 g);

// Weighted average over Readable ghost points of the ball around x, or
// nullopt when none is Readable.
std::optional<Color> fill_color(PixelCoord x, const ImageBuffer& image, const LabelMask& mask,
                                const FillParams& params, Vec2 g);
// Readable share of the ball's weight mass, in [0, 1].
double confidence(PixelCoord x, const ImageBuffer& image, const LabelMask& mask,
                  const FillParams& params, Vec2 g);

// Data-term phase of FillOrder::kSmartWithDataTerm: true while |g| > c2 holds
// somewhere on the current frontier.
bool ready(double confidence, double g_norm, const FillParams& params, bool data_phase);

struct IterationStats {
  std::size_t frontier_size = 0;
  std::size_t candidates = 0;
  std::size_t threads_requested = 0;
  std::size_t filled = 0;
  bool forced = false;
  double wall_ms = 0.0;
};

struct FillReport {
  std::vector<IterationStats> iterations;
  std::size_t inpaint_pixels = 0;
  std::size_t forced_fills = 0;
  // Pixels unreachable from any Readable pixel through Inpaint pixels; filled
  // with the nearest Readable color instead.
  std::size_t unfillable_pixels = 0;
  // One-off full scan that seeds the tracked frontier.
  std::size_t initial_scan = 0;
  double total_ms = 0.0;

  std::size_t iteration_count() const { return iterations.size(); }
};

struct FillResult {
  ImageBuffer image;
  LabelMask mask;
  FillReport report;
};

FillResult inpaint(const ImageBuffer& image, const LabelMask& mask, const GuideField& guide,
                   const FillParams& params);
// For GuideSource::kFixed / kModifiedStructureTensor, or a zero field.
FillResult inpaint(const ImageBuffer& image, const LabelMask& mask, const FillParams& params);

// Guide vector at x for the params' source (used by inpaint each iteration).
Vec2 guide_at(PixelCoord x, const ImageBuffer& image, const LabelMask& mask,
              const GuideField* guide, const FillParams& params);

}  // namespace guidefill
