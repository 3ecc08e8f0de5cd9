#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "guidefill/engine.hpp"
#include "guidefill/grid.hpp"
#include "guidefill/spline.hpp"

namespace guidefill {

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
};

// Two-tone band through `line_point` at angle theta (degrees, math frame,
// counter-clockwise from +x). half_width is measured vertically, or
// horizontally for a vertical band.
struct SyntheticProblem {
  Rect omega;
  Rect domain;
  double theta_deg = 0.0;
  Vec2 line_point;
  double half_width = 0.0;
  double line_value = 1.0;
  double background = 0.0;
  int width = 0;
  int height = 0;
};

struct RenderedProblem {
  ImageBuffer image;  // truth with D zeroed
  LabelMask mask;
  ImageBuffer truth;
};

// Pixel centers sit at x0 + (i + 1/2) w/W and y1 - (j + 1/2) h/H (y up);
// membership tests use closed intervals. kSpecError if D is not strictly
// inside Omega or the band is degenerate.
RenderedProblem render_problem(const SyntheticProblem& spec);
Vec2 pixel_center(const SyntheticProblem& spec, int i, int j);

// Band y = tan(73 deg) x +- 0.1 in [-1,1]x[-0.5,0.5] with D = [-0.8,0.8]x[-0.3,0.3].
SyntheticProblem degradation_problem(int width, int height);
// Band 0.45 <= y <= 0.55 in [0,4]x[0,1] with D = [0.4,3.96]x[0.2,0.8], H = W/4.
SyntheticProblem stripe_problem(int width);

struct DegradationRow {
  int width = 0;
  int height = 0;
  double y = 0.0;
  double transition_width = 0.0;  // continuum units
};

// Guidefill with the band's own direction as fixed g, onion order. Each
// cross-section uses the pixel row nearest y (ties go up).
std::vector<DegradationRow> degradation_study(const std::vector<std::pair<int, int>>& resolutions,
                                              const std::vector<double>& cross_sections);

// Distance between the last sample <= 10% and the first sample >= 90% of the
// rise on the left flank of the row maximum, in samples.
int transition_width_samples(const std::vector<double>& row);

struct ScalingRow {
  int width = 0;
  int height = 0;
  std::size_t n = 0;  // |D|
  double wall_ms = 0.0;
  std::size_t threads_max = 0;
  std::size_t iterations = 0;
  std::size_t analytic_iterations = 0;
};

// Stripe family under onion order with g = 0.
std::vector<ScalingRow> scaling_study(const std::vector<int>& widths, bool tracked);

struct PowerLawFit {
  double a = 0.0;
  double alpha = 0.0;
  double residual = 0.0;  // RMS in log space
};

// Least squares on (log N, log value). kDegenerateFit if all N are equal.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

// Periodic N x N half-plane problem: the bottom `known_rows` rows carry a
// two-tone pattern (1 on [1/4, 3/4) of each period) whose edges run at theta.
struct KinkingProblem {
  ImageBuffer image;
  LabelMask mask;
  int known_rows = 0;
};
KinkingProblem make_kinking_problem(int n, double theta_deg, int known_rows = 10);

// Edge angle (degrees, math frame) fitted to the rising 0.5 crossings of each
// inpainted row.
double measure_edge_angle(const ImageBuffer& image, int known_rows);

// Fill the kinking problem with fixed g at theta and return the measured angle.
double kinking_angle(int n, double theta_deg, Neighborhood neighborhood, int r, double mu);

// Red left / green right with D the middle columns over the full height.
struct ShockScene {
  ImageBuffer image;
  LabelMask mask;
  int d_x0 = 0;
  int d_x1 = 0;  // inclusive
};
ShockScene make_shock_scene(int width, int height, int d_x0, int d_x1);

struct ShockMeasure {
  int column = 0;        // gradient taken between column and column + 1
  double peak = 0.0;     // mean horizontal gradient at the peak
  double runner_up = 0.0;  // largest mean gradient two or more columns away
};
ShockMeasure measure_shock(const ImageBuffer& image, int x_begin, int x_end);

// Thick low-angle line crossing a wide hole, guided by one spline.
struct SmartOrderScene {
  ImageBuffer image;
  LabelMask mask;
  std::vector<Spline> splines;
  PixelCoord probe;  // line center at the hole's middle column
  double line_value = 1.0;
};
SmartOrderScene make_smart_order_scene();
double midline_discontinuity(const ImageBuffer& result, const SmartOrderScene& scene);

// 45 degree two-tone edge meeting a horizontal inpainting boundary; A is
// where the edge meets the boundary and B sits on the edge 14 px further
// into the readable side.
struct EdgeScene {
  ImageBuffer image;
  LabelMask mask;
  PixelCoord a;
  PixelCoord b;
};
EdgeScene make_edge_scene();

// {study}_{YYYYmmddTHHMMSS}.csv under dir.
std::filesystem::path study_csv_path(const std::filesystem::path& dir, const std::string& study);
// Minimal gnuplot script plotting column `y` against column `x` of csv.
std::string gnuplot_script(const std::filesystem::path& csv, int x, int y, const std::string& title);

}  // namespace guidefill
