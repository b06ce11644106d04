#include "edgedam/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgedam {

namespace {

double min_eigenvalue(double a, double b, double c) {
  const double half_tr = 0.5 * (a + c);
  const double d = 0.5 * (a - c);
  return half_tr - std::sqrt(d * d + b * b);
}

struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> v;

  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }

  double bilinear(double x, double y) const {
    const int x0 = std::min(static_cast<int>(std::floor(x)), w - 2);
    const int y0 = std::min(static_cast<int>(std::floor(y)), h - 2);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
    const double bot = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
    return top * (1.0 - fy) + bot * fy;
  }
};

Plane to_plane(const GrayPatch& g, double scale) {
  Plane p{g.width(), g.height(), std::vector<double>(g.values().size())};
  for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = g.values()[i] * scale;
  return p;
}

}  // namespace

std::vector<Point2> shi_tomasi_corners(const GrayPatch& gray, int max_n, double quality,
                                       double min_distance) {
  const int w = gray.width();
  const int h = gray.height();
  if (w < 3 || h < 3 || max_n <= 0) return {};
  const Plane img = to_plane(gray, 1.0);

  std::vector<double> gxx(img.v.size(), 0.0), gxy(img.v.size(), 0.0), gyy(img.v.size(), 0.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double gx = (img.at(x + 1, y - 1) + 2 * img.at(x + 1, y) + img.at(x + 1, y + 1)) -
                        (img.at(x - 1, y - 1) + 2 * img.at(x - 1, y) + img.at(x - 1, y + 1));
      const double gy = (img.at(x - 1, y + 1) + 2 * img.at(x, y + 1) + img.at(x + 1, y + 1)) -
                        (img.at(x - 1, y - 1) + 2 * img.at(x, y - 1) + img.at(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      gxx[i] = gx * gx;
      gxy[i] = gx * gy;
      gyy[i] = gy * gy;
    }
  }

  std::vector<double> resp(img.v.size(), 0.0);
  double peak = 0.0;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      double a = 0.0, b = 0.0, c = 0.0;
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          const std::size_t k = static_cast<std::size_t>(y + j) * w + (x + i);
          a += gxx[k];
          b += gxy[k];
          c += gyy[k];
        }
      }
      const double r = std::max(0.0, min_eigenvalue(a, b, c));
      resp[static_cast<std::size_t>(y) * w + x] = r;
      peak = std::max(peak, r);
    }
  }
  if (peak <= 0.0) return {};

  struct Cand {
    double r;
    int x;
    int y;
  };
  std::vector<Cand> cands;
  const double floor_r = quality * peak;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double r = resp[static_cast<std::size_t>(y) * w + x];
      if (r <= floor_r) continue;
      bool is_max = true;
      for (int j = -1; j <= 1 && is_max; ++j) {
        for (int i = -1; i <= 1; ++i) {
          if (resp[static_cast<std::size_t>(y + j) * w + (x + i)] > r) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) cands.push_back({r, x, y});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.r != b.r) return a.r > b.r;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });

  std::vector<Point2> out;
  for (const Cand& c : cands) {
    const Point2 p{static_cast<double>(c.x), static_cast<double>(c.y)};
    const bool crowded = std::any_of(out.begin(), out.end(),
                                     [&](Point2 q) { return distance(p, q) < min_distance; });
    if (crowded) continue;
    out.push_back(p);
    if (static_cast<int>(out.size()) == max_n) break;
  }
  return out;
}

std::vector<Flow> lk_flow(const GrayPatch& prev_gray, const GrayPatch& cur_gray,
                          const std::vector<Point2>& points, Vec2 guess, const LkParams& params) {
  if (prev_gray.dims() != cur_gray.dims()) {
    throw std::invalid_argument("optical flow needs images of equal size");
  }
  const Plane prev = to_plane(prev_gray, 1.0 / 255.0);
  const Plane cur = to_plane(cur_gray, 1.0 / 255.0);
  const int hw = params.half_window;
  const int side = 2 * hw + 1;
  const double n = static_cast<double>(side * side);

  std::vector<Flow> out;
  out.reserve(points.size());
  std::vector<double> ix(side * side), iy(side * side), iv(side * side);
  for (const Point2& p : points) {
    Flow f{guess, false};
    const int px = static_cast<int>(std::lround(p.x));
    const int py = static_cast<int>(std::lround(p.y));
    if (px - hw < 1 || py - hw < 1 || px + hw > prev.w - 2 || py + hw > prev.h - 2) {
      out.push_back(f);
      continue;
    }
    double a = 0.0, b = 0.0, c = 0.0;
    for (int j = -hw, k = 0; j <= hw; ++j) {
      for (int i = -hw; i <= hw; ++i, ++k) {
        const int x = px + i;
        const int y = py + j;
        ix[k] = 0.5 * (prev.at(x + 1, y) - prev.at(x - 1, y));
        iy[k] = 0.5 * (prev.at(x, y + 1) - prev.at(x, y - 1));
        iv[k] = prev.at(x, y);
        a += ix[k] * ix[k];
        b += ix[k] * iy[k];
        c += iy[k] * iy[k];
      }
    }
    if (min_eigenvalue(a, b, c) / n < params.min_eigen) {
      out.push_back(f);
      continue;
    }
    const double det = a * c - b * b;

    auto in_bounds = [&](Vec2 d) {
      return px - hw + d.dx >= 0.0 && py - hw + d.dy >= 0.0 &&
             px + hw + d.dx <= cur.w - 1.0 && py + hw + d.dy <= cur.h - 1.0;
    };
    Vec2 d = guess;
    bool ok = in_bounds(d);
    for (int it = 0; ok && it < params.max_iterations; ++it) {
      double bx = 0.0, by = 0.0;
      for (int j = -hw, k = 0; j <= hw; ++j) {
        for (int i = -hw; i <= hw; ++i, ++k) {
          const double e = iv[k] - cur.bilinear(px + i + d.dx, py + j + d.dy);
          bx += ix[k] * e;
          by += iy[k] * e;
        }
      }
      const Vec2 step{(c * bx - b * by) / det, (a * by - b * bx) / det};
      d = d + step;
      ok = in_bounds(d);
      if (length(step) < params.convergence) break;
    }
    if (ok) {
      double residual = 0.0;
      for (int j = -hw, k = 0; j <= hw; ++j) {
        for (int i = -hw; i <= hw; ++i, ++k) {
          residual += std::abs(iv[k] - cur.bilinear(px + i + d.dx, py + j + d.dy));
        }
      }
      f.residual = residual / n;
      ok = f.residual <= params.max_residual;
    }
    f.v = d;
    f.valid = ok && std::isfinite(d.dx) && std::isfinite(d.dy);
    out.push_back(f);
  }
  return out;
}

Vec2 median_flow(const std::vector<Vec2>& flows) {
  if (flows.empty()) throw std::invalid_argument("median of no flows");
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };
  std::vector<double> xs, ys;
  for (Vec2 f : flows) {
    xs.push_back(f.dx);
    ys.push_back(f.dy);
  }
  return {median(std::move(xs)), median(std::move(ys))};
}

Vec2 MotionEstimator::estimate(const Frame& prev, const Frame& cur, const Box& prev_box) {
  if (prev.dims() != cur.dims()) throw std::invalid_argument("frames differ in size");
  if (prev_box_) {
    const Vec2 disp = prev_box.center() - prev_box_->center();
    ema_ = cfg_.ema * disp + (1.0 - cfg_.ema) * ema_;
  }
  prev_box_ = prev_box;
  last_valid_ = 0;

  std::vector<Vec2> valid;
  try {
    const double m = cfg_.margin;
    const Box grown(prev_box.x() - m, prev_box.y() - m, prev_box.w() + 2 * m,
                    prev_box.h() + 2 * m);
    const PixelRect region = covering_rect(grown, prev.dims());
    const PixelRect inner = covering_rect(prev_box, prev.dims());
    const GrayImage g0 = gray_region(prev.image, region);
    const GrayImage g1 = gray_region(cur.image, region);

    std::vector<Point2> pts = shi_tomasi_corners(gray_region(prev.image, inner), cfg_.max_corners);
    for (Point2& p : pts) p = {p.x + inner.x0 - region.x0, p.y + inner.y0 - region.y0};
    // Seeding from rest and from the last estimate; a single-level solve
    // seeded on the wrong side of a heading change settles in a false minimum.
    const std::vector<Flow> a = lk_flow(g0, g1, pts, {}, cfg_.lk);
    const std::vector<Flow> b = lk_flow(g0, g1, pts, last_, cfg_.lk);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (a[k].valid && (!b[k].valid || a[k].residual <= b[k].residual)) {
        valid.push_back(a[k].v);
      } else if (b[k].valid) {
        valid.push_back(b[k].v);
      }
    }
  } catch (const std::out_of_range&) {
    valid.clear();
  }

  if (static_cast<int>(valid.size()) >= cfg_.min_valid) {
    last_valid_ = static_cast<int>(valid.size());
    last_ = median_flow(valid);
  } else {
    last_ = ema_;
  }
  return last_;
}

}  // namespace edgedam
