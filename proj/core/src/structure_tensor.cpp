#include "guidefill/structure_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace guidefill {

TensorSample eigen_decompose(const SymMatrix2& m) {
  TensorSample t;
  t.matrix = m;
  const double mean = 0.5 * (m.xx + m.yy);
  const double half_diff = 0.5 * (m.xx - m.yy);
  const double radius = std::hypot(half_diff, m.xy);
  t.lambda_max = mean + radius;
  t.lambda_min = mean - radius;
  const double phi = 0.5 * std::atan2(2.0 * m.xy, m.xx - m.yy);
  t.v_max = {std::cos(phi), std::sin(phi)};
  t.v_min = {-std::sin(phi), std::cos(phi)};
  return t;
}

int gaussian_half_width(double sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be >= 0");
  return static_cast<int>(std::ceil(2.0 * sigma));
}

std::vector<double> truncated_gaussian(double sigma) {
  const int half = gaussian_half_width(sigma);
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  if (half == 0) {
    k[0] = 1.0;
    return k;
  }
  double sum = 0.0;
  for (int a = -half; a <= half; ++a) {
    const double w = std::exp(-0.5 * (a * a) / (sigma * sigma));
    k[static_cast<std::size_t>(a + half)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

int tensor_reach(double sigma, double rho) {
  return gaussian_half_width(sigma) + 1 + gaussian_half_width(rho);
}

double orientation_degrees(Vec2 v_image) {
  double deg = std::atan2(-v_image.y, v_image.x) * 180.0 / std::numbers::pi;
  deg = std::fmod(deg, 180.0);
  if (deg < 0.0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  return deg;
}

namespace {

// Dense square patch of side 2*half+1 centered at a pixel.
struct Patch {
  int half = 0;
  int side = 0;
  std::vector<double> v;
  explicit Patch(int h) : half(h), side(2 * h + 1), v(static_cast<std::size_t>(side * side), 0.0) {}
  double& at(int a, int b) { return v[static_cast<std::size_t>((b + half) * side + (a + half))]; }
  double at(int a, int b) const {
    return v[static_cast<std::size_t>((b + half) * side + (a + half))];
  }
};

// Separable convolution of a patch (side 2*(out_half+k_half)+1) down to one of
// side 2*out_half+1.
Patch convolve_valid(const Patch& in, const std::vector<double>& k, int out_half) {
  const int kh = static_cast<int>(k.size() / 2);
  Patch tmp(in.half);
  for (int b = -in.half; b <= in.half; ++b) {
    for (int a = -out_half; a <= out_half; ++a) {
      double s = 0.0;
      for (int t = -kh; t <= kh; ++t) s += k[static_cast<std::size_t>(t + kh)] * in.at(a + t, b);
      tmp.at(a, b) = s;
    }
  }
  Patch out(out_half);
  for (int b = -out_half; b <= out_half; ++b) {
    for (int a = -out_half; a <= out_half; ++a) {
      double s = 0.0;
      for (int t = -kh; t <= kh; ++t) s += k[static_cast<std::size_t>(t + kh)] * tmp.at(a, b + t);
      out.at(a, b) = s;
    }
  }
  return out;
}

void check_pixel(const ImageBuffer& image, PixelCoord x) {
  if (x.i < 0 || x.j < 0 || x.i >= image.width() || x.j >= image.height()) {
    throw Error(ErrorCode::kInvalidArgument, "tensor sample point outside the image");
  }
}

TensorSample tensor_impl(const ImageBuffer& image, PixelCoord x, double sigma, double rho) {
  check_pixel(image, x);
  const std::vector<double> ks = truncated_gaussian(sigma);
  const std::vector<double> kr = truncated_gaussian(rho);
  const int hs = static_cast<int>(ks.size() / 2);
  const int hr = static_cast<int>(kr.size() / 2);
  const int grad_half = hr + 1;
  const int raw_half = grad_half + hs;

  SymMatrix2 j;
  for (int c = 0; c < image.channels(); ++c) {
    Patch raw(raw_half);
    for (int b = -raw_half; b <= raw_half; ++b) {
      const int jj = std::clamp(x.j + b, 0, image.height() - 1);
      for (int a = -raw_half; a <= raw_half; ++a) {
        const int ii = std::clamp(x.i + a, 0, image.width() - 1);
        raw.at(a, b) = image.at(ii, jj, c);
      }
    }
    const Patch smooth = convolve_valid(raw, ks, grad_half);
    for (int b = -hr; b <= hr; ++b) {
      for (int a = -hr; a <= hr; ++a) {
        const double gx = 0.5 * (smooth.at(a + 1, b) - smooth.at(a - 1, b));
        const double gy = 0.5 * (smooth.at(a, b + 1) - smooth.at(a, b - 1));
        const double w = kr[static_cast<std::size_t>(a + hr)] * kr[static_cast<std::size_t>(b + hr)];
        j.xx += w * gx * gx;
        j.xy += w * gx * gy;
        j.yy += w * gy * gy;
      }
    }
  }
  return eigen_decompose(j);
}

}  // namespace

TensorSample structure_tensor(const ImageBuffer& image, PixelCoord x, double sigma, double rho) {
  return tensor_impl(image, x, sigma, rho);
}

TensorSample structure_tensor(const ImageBuffer& image, const LabelMask& mask, PixelCoord x,
                              double sigma, double rho) {
  check_same_size(image, mask);
  check_pixel(image, x);
  const int reach = tensor_reach(sigma, rho);
  for (int b = -reach; b <= reach; ++b) {
    const int jj = x.j + b;
    if (jj < 0 || jj >= mask.height()) continue;
    for (int a = -reach; a <= reach; ++a) {
      const int ii = x.i + a;
      if (ii < 0 || ii >= mask.width()) continue;
      if (!mask.readable(ii, jj)) {
        throw Error(ErrorCode::kWindowOverlap,
                    "structure tensor window reaches a non-readable pixel");
      }
    }
  }
  return tensor_impl(image, x, sigma, rho);
}

TensorSample modified_structure_tensor(const ImageBuffer& image, const LabelMask& mask,
                                       PixelCoord x, double sigma, double rho) {
  check_same_size(image, mask);
  check_pixel(image, x);
  const std::vector<double> ks = truncated_gaussian(sigma);
  const std::vector<double> kr = truncated_gaussian(rho);
  const int hs = static_cast<int>(ks.size() / 2);
  const int hr = static_cast<int>(kr.size() / 2);
  const int grad_half = hr + 1;
  const int raw_half = grad_half + hs;

  auto indicator = [&](int a, int b) {
    int ii = x.i + a;
    const int jj = x.j + b;
    if (!mask.resolve(ii, jj)) return 0.0;
    return mask.readable(ii, jj) ? 1.0 : 0.0;
  };

  Patch chi(raw_half);
  for (int b = -raw_half; b <= raw_half; ++b) {
    for (int a = -raw_half; a <= raw_half; ++a) chi.at(a, b) = indicator(a, b);
  }
  double mass = 0.0;
  for (int b = -hr; b <= hr; ++b) {
    for (int a = -hr; a <= hr; ++a) {
      mass += kr[static_cast<std::size_t>(a + hr)] * kr[static_cast<std::size_t>(b + hr)] *
              chi.at(a, b);
    }
  }
  if (mass <= 0.0) {
    throw Error(ErrorCode::kZeroMass, "modified structure tensor window holds no readable pixel");
  }
  const Patch chi_smooth = convolve_valid(chi, ks, grad_half);

  SymMatrix2 j;
  for (int c = 0; c < image.channels(); ++c) {
    Patch weighted(raw_half);
    for (int b = -raw_half; b <= raw_half; ++b) {
      for (int a = -raw_half; a <= raw_half; ++a) {
        if (chi.at(a, b) == 0.0) continue;
        int ii = x.i + a;
        mask.resolve(ii, x.j + b);
        weighted.at(a, b) = image.at(ii, x.j + b, c);
      }
    }
    const Patch num = convolve_valid(weighted, ks, grad_half);
    auto v_sigma = [&](int a, int b, double& out) {
      const double den = chi_smooth.at(a, b);
      if (den <= 0.0) return false;
      out = num.at(a, b) / den;
      return true;
    };
    for (int b = -hr; b <= hr; ++b) {
      for (int a = -hr; a <= hr; ++a) {
        if (chi.at(a, b) == 0.0) continue;
        double l = 0.0, r = 0.0, u = 0.0, d = 0.0;
        if (!v_sigma(a - 1, b, l) || !v_sigma(a + 1, b, r) || !v_sigma(a, b - 1, u) ||
            !v_sigma(a, b + 1, d)) {
          continue;
        }
        const double gx = 0.5 * (r - l);
        const double gy = 0.5 * (d - u);
        const double w = kr[static_cast<std::size_t>(a + hr)] * kr[static_cast<std::size_t>(b + hr)];
        j.xx += w * gx * gx;
        j.xy += w * gx * gy;
        j.yy += w * gy * gy;
      }
    }
  }
  j.xx /= mass;
  j.xy /= mass;
  j.yy /= mass;
  return eigen_decompose(j);
}

}  // namespace guidefill
