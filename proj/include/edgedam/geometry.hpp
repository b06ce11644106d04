#pragma once

#include <span>

namespace edgedam {

struct Vec2 {
  double dx = 0.0;
  double dy = 0.0;

  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.dx + b.dx, a.dy + b.dy}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.dx - b.dx, a.dy - b.dy}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.dx, s * v.dy}; }
double length(Vec2 v);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.dx, p.y + v.dy}; }
inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
double distance(Point2 a, Point2 b);

/// Image extent in pixels. Both sides are at least one pixel.
class FrameDims {
 public:
  FrameDims() = default;
  FrameDims(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  long long pixel_count() const { return static_cast<long long>(width_) * height_; }

  bool operator==(const FrameDims&) const = default;

 private:
  int width_ = 1;
  int height_ = 1;
};

/// Axis-aligned rectangle, top-left corner plus size, in real-valued pixel
/// coordinates. Construction rejects non-finite fields and non-positive sizes.
class Box {
 public:
  Box() = default;
  Box(double x, double y, double w, double h);

  static Box from_center(Point2 center, double w, double h);
  /// Box spanning [x0, x1) x [y0, y1).
  static Box from_corners(double x0, double y0, double x1, double y1);

  double x() const { return x_; }
  double y() const { return y_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double right() const { return x_ + w_; }
  double bottom() const { return y_ + h_; }
  Point2 center() const { return {x_ + w_ / 2.0, y_ + h_ / 2.0}; }
  double diagonal() const;

  Box translated(Vec2 offset) const { return {x_ + offset.dx, y_ + offset.dy, w_, h_}; }

  bool operator==(const Box&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double w_ = 1.0;
  double h_ = 1.0;
};

double area(const Box& b);
double intersection_area(const Box& a, const Box& b);
/// True when the boxes share a region of positive area.
bool intersects(const Box& a, const Box& b);
double iou(const Box& a, const Box& b);

/// Smallest box enclosing every input. Throws std::invalid_argument on an
/// empty list.
Box union_bbox(std::span<const Box> boxes);

/// Clips a box to [0, W] x [0, H]. The result keeps at least one pixel per
/// side even when the input lies entirely outside the frame.
Box clamp_to_frame(const Box& b, FrameDims frame);
bool inside_frame(const Box& b, FrameDims frame);

/// Box centred on `prev` and scaled by `kappa` per side, clipped to the frame.
/// Throws std::invalid_argument when kappa < 1.
Box roi_crop(const Box& prev, double kappa, FrameDims frame);

/// Maps a box expressed relative to a crop back to full-frame coordinates.
Box to_frame_coords(const Box& box_in_crop, const Box& crop);

/// Centre distance between `a` and `b`, divided by the diagonal of `b`.
double norm_displacement(const Box& a, const Box& b);

}  // namespace edgedam
