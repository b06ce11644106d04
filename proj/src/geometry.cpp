#include "edgedam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edgedam {

double length(Vec2 v) { return std::hypot(v.dx, v.dy); }

double distance(Point2 a, Point2 b) { return length(a - b); }

FrameDims::FrameDims(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("frame dimensions must be >= 1, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
}

Box::Box(double x, double y, double w, double h) : x_(x), y_(y), w_(w), h_(h) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h)) {
    throw std::invalid_argument("box fields must be finite");
  }
  if (w <= 0.0 || h <= 0.0) {
    throw std::invalid_argument("box size must be positive, got " + std::to_string(w) + "x" +
                                std::to_string(h));
  }
}

Box Box::from_center(Point2 center, double w, double h) {
  return {center.x - w / 2.0, center.y - h / 2.0, w, h};
}

Box Box::from_corners(double x0, double y0, double x1, double y1) {
  return {x0, y0, x1 - x0, y1 - y0};
}

double Box::diagonal() const { return std::hypot(w_, h_); }

double area(const Box& b) { return b.w() * b.h(); }

double intersection_area(const Box& a, const Box& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x(), b.x());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y(), b.y());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

bool intersects(const Box& a, const Box& b) { return intersection_area(a, b) > 0.0; }

double iou(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = area(a) + area(b) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Box union_bbox(std::span<const Box> boxes) {
  if (boxes.empty()) throw std::invalid_argument("union_bbox of an empty list");
  double x0 = boxes.front().x();
  double y0 = boxes.front().y();
  double x1 = boxes.front().right();
  double y1 = boxes.front().bottom();
  for (const Box& b : boxes.subspan(1)) {
    x0 = std::min(x0, b.x());
    y0 = std::min(y0, b.y());
    x1 = std::max(x1, b.right());
    y1 = std::max(y1, b.bottom());
  }
  return Box::from_corners(x0, y0, x1, y1);
}

namespace {

// Clips [lo, hi) to [0, limit), keeping at least one unit.
std::pair<double, double> clip_span(double lo, double hi, double limit) {
  double a = std::max(lo, 0.0);
  double b = std::min(hi, limit);
  if (b - a < 1.0) {
    a = std::clamp(a, 0.0, limit - 1.0);
    b = std::min(a + 1.0, limit);
    if (b - a < 1.0) a = b - 1.0;
  }
  return {a, b};
}

}  // namespace

Box clamp_to_frame(const Box& b, FrameDims frame) {
  const auto [x0, x1] = clip_span(b.x(), b.right(), frame.width());
  const auto [y0, y1] = clip_span(b.y(), b.bottom(), frame.height());
  return Box::from_corners(x0, y0, x1, y1);
}

bool inside_frame(const Box& b, FrameDims frame) {
  return b.x() >= 0.0 && b.y() >= 0.0 && b.right() <= frame.width() &&
         b.bottom() <= frame.height();
}

Box roi_crop(const Box& prev, double kappa, FrameDims frame) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("roi_crop requires kappa >= 1");
  const Box scaled = Box::from_center(prev.center(), kappa * prev.w(), kappa * prev.h());
  return clamp_to_frame(scaled, frame);
}

Box to_frame_coords(const Box& box_in_crop, const Box& crop) {
  return box_in_crop.translated({crop.x(), crop.y()});
}

double norm_displacement(const Box& a, const Box& b) {
  return distance(a.center(), b.center()) / b.diagonal();
}

}  // namespace edgedam
