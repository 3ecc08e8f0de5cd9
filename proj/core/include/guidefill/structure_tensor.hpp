#pragma once

#include <vector>

#include "guidefill/grid.hpp"

namespace guidefill {

struct SymMatrix2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

// A 2x2 structure tensor with its eigen-decomposition; lambda_max >= lambda_min
// and the eigenvectors are unit length and orthogonal. Vectors use image axes
// (x right, y down).
struct TensorSample {
  SymMatrix2 matrix;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  Vec2 v_max{1.0, 0.0};
  Vec2 v_min{0.0, 1.0};
};

TensorSample eigen_decompose(const SymMatrix2& m);

// Unit-mass Gaussian of standard deviation sigma truncated to the
// (4 sigma + 1)-wide window, i.e. half-width ceil(2 sigma).
std::vector<double> truncated_gaussian(double sigma);
int gaussian_half_width(double sigma);

// Distance from x over which the smoothing, centered-difference and
// integration stencils of the structure tensor reach.
int tensor_reach(double sigma, double rho);

// J = g_rho * (grad u_sigma (x) grad u_sigma), summed over channels.
// Out-of-lattice samples replicate the nearest edge pixel. With a mask, every
// in-lattice pixel within tensor_reach must be Readable (else kWindowOverlap).
TensorSample structure_tensor(const ImageBuffer& image, PixelCoord x, double sigma, double rho);
TensorSample structure_tensor(const ImageBuffer& image, const LabelMask& mask, PixelCoord x,
                              double sigma, double rho);

// Indicator-weighted variant that only consumes Readable pixels, so it is
// defined on the boundary of the inpainting domain. kZeroMass when the
// integration window holds no Readable pixel.
TensorSample modified_structure_tensor(const ImageBuffer& image, const LabelMask& mask,
                                       PixelCoord x, double sigma, double rho);

// Orientation of v in degrees within [0, 180), measured counter-clockwise from
// the x axis with y pointing up (image y is flipped).
double orientation_degrees(Vec2 v_image);

}  // namespace guidefill
