#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace guidefill {

// Domain failures that callers are expected to handle by kind.
enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kEmptyRing,
  kWindowOverlap,
  kZeroMass,
  kNoEntry,
  kEmptySet,
  kQuadratureFailure,
  kSpecError,
  kDegenerateFit,
  kInvariantBreach,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
// Counter-clockwise perpendicular.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

// Continuous position in pixel units; pixel (i, j) has its center at (i, j).
using GhostPoint = Vec2;

struct PixelCoord {
  int i = 0;  // column
  int j = 0;  // row

  // Row-major (j, i) lexicographic order.
  friend constexpr auto operator<=>(const PixelCoord& a, const PixelCoord& b) {
    if (auto c = a.j <=> b.j; c != 0) return c;
    return a.i <=> b.i;
  }
  friend constexpr bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

// Sorted (j, i) list of distinct coordinates.
using PixelSet = std::vector<PixelCoord>;

enum class Label : std::uint8_t { kReadable = 0, kInpaint = 1, kBystander = 2 };

inline constexpr int kMaxChannels = 4;

struct Color {
  std::array<double, kMaxChannels> v{};
  int channels = 0;

  double& operator[](int c) { return v[static_cast<std::size_t>(c)]; }
  double operator[](int c) const { return v[static_cast<std::size_t>(c)]; }
};

class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return values_.empty(); }

  float at(int i, int j, int c) const {
    return values_[index(i, j) * static_cast<std::size_t>(channels_) +
                   static_cast<std::size_t>(c)];
  }
  float& at(int i, int j, int c) {
    return values_[index(i, j) * static_cast<std::size_t>(channels_) +
                   static_cast<std::size_t>(c)];
  }
  Color color(int i, int j) const;
  void set_color(int i, int j, const Color& color);

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(i);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> values_;
};

// Per-pixel labels. `periodic_x` wraps the lattice horizontally; it is off for
// ordinary images and on for the periodic test domains of the limits module.
class LabelMask {
 public:
  LabelMask() = default;
  LabelMask(int width, int height, Label fill = Label::kReadable);

  int width() const { return width_; }
  int height() const { return height_; }
  bool periodic_x() const { return periodic_x_; }
  void set_periodic_x(bool on) { periodic_x_ = on; }

  Label at(int i, int j) const { return labels_[index(i, j)]; }
  void set(int i, int j, Label label) { labels_[index(i, j)] = label; }
  Label at(PixelCoord p) const { return at(p.i, p.j); }
  void set(PixelCoord p, Label label) { set(p.i, p.j, label); }

  bool readable(int i, int j) const { return at(i, j) == Label::kReadable; }

  // Resolves a possibly out-of-range column through the periodic wrap.
  // Returns false when (i, j) lies outside the lattice.
  bool resolve(int& i, int j) const {
    if (j < 0 || j >= height_) return false;
    if (i >= 0 && i < width_) return true;
    if (!periodic_x_) return false;
    i %= width_;
    if (i < 0) i += width_;
    return true;
  }

  std::size_t count(Label label) const;
  std::span<const Label> labels() const { return labels_; }

  bool operator==(const LabelMask&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(i);
  }

  int width_ = 0;
  int height_ = 0;
  bool periodic_x_ = false;
  std::vector<Label> labels_;
};

void check_same_size(const ImageBuffer& image, const LabelMask& mask);

// Pixels of `target` label with an 8-neighbor of a different label. The
// lattice edge alone does not make a pixel a boundary pixel.
PixelSet inner_boundary(const LabelMask& mask, Label target);

// Pixels of another label with an 8-neighbor of label `target`.
PixelSet outer_boundary(const LabelMask& mask, Label target);

// Inpaint pixels with at least one Readable 8-neighbor.
PixelSet active_boundary(const LabelMask& mask);

// Single-pixel form of the active-boundary predicate.
bool is_active(const LabelMask& mask, int i, int j);

// Fractional parts closer than this to an integer are snapped, so that
// ghost points that sit on lattice rows or columns up to rounding do not
// pick up a spurious stencil neighbor.
inline constexpr double kLatticeSnap = 1e-9;

struct BilinearStencil {
  std::array<int, 4> i{};
  std::array<int, 4> j{};
  std::array<double, 4> w{};
  int size = 0;
};

// Stencil centers with nonzero bilinear weight; false if any falls outside the
// lattice (after periodic wrap).
bool bilinear_stencil(const LabelMask& mask, GhostPoint p, BilinearStencil& out);

// Bilinear value at `p`, or nullopt when any nonzero-weight stencil center is
// not Readable.
std::optional<Color> sample_bilinear(const ImageBuffer& image, const LabelMask& mask,
                                     GhostPoint p);

// Lattice offsets (n, m) with n^2 + m^2 <= r^2, row-major in m then n.
std::vector<Vec2> ball_offsets(int r);

// Rotation taking (0, 1) onto g / |g|; identity when g is zero.
struct Rotation {
  double c00 = 1.0, c01 = 0.0, c10 = 0.0, c11 = 1.0;
  Vec2 apply(Vec2 v) const { return {c00 * v.x + c01 * v.y, c10 * v.x + c11 * v.y}; }
};
Rotation rotation_onto(Vec2 g);

// center + R (n, m) over the lattice ball of radius r.
std::vector<GhostPoint> rotated_ball(GhostPoint center, Vec2 g, int r);

}  // namespace guidefill
