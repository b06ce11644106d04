#include "edgedam/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgedam {

GrayPatch make_template(const RgbImage& image, const Box& box) {
  return resample(to_gray(crop_patch(image, box)), kTemplateSide, kTemplateSide);
}

namespace {

/// Luma sampled bilinearly on the grid x0 + (i + 0.5) * ex - 0.5, the same
/// pixel-centre convention resample() uses, so a grid that starts on a box
/// corner reproduces that box's template. Coordinates clamp to the image.
GrayImage sample_grid(const RgbImage& image, double x0, double y0, double ex, double ey, int cols,
                      int rows) {
  const int w = image.width();
  const int h = image.height();
  auto lum = [&](int x, int y) { return static_cast<double>(luma(image.at(x, y))); };
  GrayImage out(FrameDims(cols, rows));
  for (int j = 0; j < rows; ++j) {
    const double sy = std::clamp(y0 + (j + 0.5) * ey - 0.5, 0.0, h - 1.0);
    const int iy = std::min(static_cast<int>(sy), h - 1);
    const int iy1 = std::min(iy + 1, h - 1);
    const double fy = sy - iy;
    for (int i = 0; i < cols; ++i) {
      const double sx = std::clamp(x0 + (i + 0.5) * ex - 0.5, 0.0, w - 1.0);
      const int ix = std::min(static_cast<int>(sx), w - 1);
      const int ix1 = std::min(ix + 1, w - 1);
      const double fx = sx - ix;
      const double top = lum(ix, iy) + fx * (lum(ix1, iy) - lum(ix, iy));
      const double bot = lum(ix, iy1) + fx * (lum(ix1, iy1) - lum(ix, iy1));
      const double v = top + fy * (bot - top);
      out.set(i, j, static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)));
    }
  }
  return out;
}

}  // namespace

std::optional<NccMatch> scaled_template_search(const RgbImage& image, const GrayPatch& templ,
                                               double box_w, double box_h, const Box& region,
                                               Point2 prefer) {
  const FrameDims dims = image.dims();
  const double x0 = std::max(0.0, region.x());
  const double y0 = std::max(0.0, region.y());
  const double x1 = std::min<double>(dims.width(), region.right());
  const double y1 = std::min<double>(dims.height(), region.bottom());
  if (!(x1 > x0 && y1 > y0)) return std::nullopt;

  const double ex = box_w / templ.width();
  const double ey = box_h / templ.height();
  const int rw = static_cast<int>(std::floor((x1 - x0) / ex + 1e-9));
  const int rh = static_cast<int>(std::floor((y1 - y0) / ey + 1e-9));
  if (rw < templ.width() || rh < templ.height()) return std::nullopt;

  const NccScores map = ncc_map(sample_grid(image, x0, y0, ex, ey, rw, rh), templ);
  const double px = (prefer.x - x0) / ex;
  const double py = (prefer.y - y0) / ey;

  int bx = 0;
  int by = 0;
  double best = -2.0;
  double best_d = 0.0;
  for (int oy = 0; oy < map.rows; ++oy) {
    for (int ox = 0; ox < map.cols; ++ox) {
      const double s = map.at(ox, oy);
      const double d = std::hypot(ox - px, oy - py);
      if (s > best || (s == best && d < best_d)) {
        best = s;
        best_d = d;
        bx = ox;
        by = oy;
      }
    }
  }
  return NccMatch{Box(x0 + bx * ex, y0 + by * ey, box_w, box_h), best};
}

TemplateTracker::TemplateTracker(double search_factor) : search_factor_(search_factor) {
  if (!(search_factor >= 1.0)) throw std::invalid_argument("search factor must be >= 1");
}

void TemplateTracker::init(const Frame& frame, const Box& box) {
  const Box snapped(std::round(box.x()), std::round(box.y()), std::max(1.0, std::round(box.w())),
                    std::max(1.0, std::round(box.h())));
  const Box inside = clamp_to_frame(snapped, frame.dims());
  templ_ = make_template(frame.image, inside);
  box_ = inside;
}

TrackResult TemplateTracker::update(const Frame& frame) {
  if (!box_) throw std::logic_error("tracker update before init");
  const Box last = *box_;
  const Box window =
      Box::from_center(last.center(), last.w() * search_factor_, last.h() * search_factor_);
  const auto match =
      scaled_template_search(frame.image, templ_, last.w(), last.h(), window, {last.x(), last.y()});
  if (!match) return {last, 0.0};
  box_ = match->box;
  return {match->box, std::max(0.0, match->score)};
}

}  // namespace edgedam
