#pragma once

#include <vector>

#include "guidefill/grid.hpp"
#include "guidefill/spline.hpp"
#include "guidefill/structure_tensor.hpp"

namespace guidefill {

struct GuideField {
  int width = 0;
  int height = 0;
  std::vector<Vec2> vectors;

  GuideField() = default;
  GuideField(int w, int h)
      : width(w), height(h), vectors(static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {}
  Vec2 at(int i, int j) const {
    return vectors[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(i)];
  }
  Vec2& at(int i, int j) {
    return vectors[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(i)];
  }
};

struct DetectParams {
  double sigma = 2.0;
  double rho = 4.0;
  double lambda = 1e-5;
  double canny_low = 0.08;
  double canny_high = 0.2;
  double cluster_radius = 3.0;
  // 0 selects 2 * ring_distance.
  double max_entry_distance = 0.0;
};

// Chebyshev distance (8-connected) from every pixel to the nearest non-Readable
// pixel. Pixels outside the lattice are not sources. Unreachable pixels hold -1.
std::vector<int> chebyshev_distance_to_unreadable(const LabelMask& mask);

// Distance at which the ring sits: one past the reach of the tensor cascade,
// so the cascade at a ring pixel reads only Readable pixels.
int ring_distance(double sigma, double rho);

// Readable pixels at Chebyshev distance exactly ring_distance from D u B.
// kEmptyRing when there are none.
PixelSet compute_ring(const LabelMask& mask, double sigma, double rho);

struct EdgeSeed {
  PixelCoord at;
  double strength = 0.0;
};

// Canny on an annulus around the ring (Readable pixels only); returns ring
// pixels touching a retained edge, with near-duplicates (within
// cluster_radius) collapsed onto the strongest. Sorted by (j, i).
std::vector<EdgeSeed> detect_edge_seeds(const ImageBuffer& image, const LabelMask& mask,
                                        const PixelSet& ring, const DetectParams& params);

// Direction +-tanh((l+ - l-)/Lambda) v- pointing into D; control points run
// from the seed to the last ray sample still inside D u B. kNoEntry when
// neither sign reaches an Inpaint pixel within max_entry_distance.
Spline make_spline(PixelCoord seed, const TensorSample& tensor, const LabelMask& mask,
                   double lambda, double max_entry_distance);

// g(x) for x in D from the nearest spline; zero elsewhere and beyond 3 eta.
GuideField build_guide_field(const std::vector<Spline>& splines, const LabelMask& mask,
                             double eta = 3.0);

// ring -> seeds -> tensor -> splines. Seeds whose spline fails to enter D are
// dropped. Throws kEmptyRing as compute_ring does.
std::vector<Spline> detect_splines(const ImageBuffer& image, const LabelMask& mask,
                                   const DetectParams& params = {});

}  // namespace guidefill
