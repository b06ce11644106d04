#include "edgedam/media.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edgedam {

RgbImage::RgbImage(FrameDims dims, Rgb fill)
    : dims_(dims), data_(static_cast<std::size_t>(dims.pixel_count()) * 3) {
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

RgbImage::RgbImage(FrameDims dims, std::vector<std::uint8_t> bytes)
    : dims_(dims), data_(std::move(bytes)) {
  if (data_.size() != static_cast<std::size_t>(dims.pixel_count()) * 3) {
    throw std::invalid_argument("RGB buffer length does not match dimensions");
  }
}

GrayImage::GrayImage(FrameDims dims, std::uint8_t fill)
    : dims_(dims), data_(static_cast<std::size_t>(dims.pixel_count()), fill) {}

GrayImage::GrayImage(FrameDims dims, std::vector<std::uint8_t> values)
    : dims_(dims), data_(std::move(values)) {
  if (data_.size() != static_cast<std::size_t>(dims.pixel_count())) {
    throw std::invalid_argument("gray buffer length does not match dimensions");
  }
}

PixelRect covering_rect(const Box& box, FrameDims frame) {
  const double fx0 = std::max(std::floor(box.x()), 0.0);
  const double fy0 = std::max(std::floor(box.y()), 0.0);
  const double fx1 = std::min(std::ceil(box.right()), static_cast<double>(frame.width()));
  const double fy1 = std::min(std::ceil(box.bottom()), static_cast<double>(frame.height()));
  if (fx1 <= fx0 || fy1 <= fy0) {
    throw std::out_of_range("box does not intersect the frame");
  }
  return {static_cast<int>(fx0), static_cast<int>(fy0), static_cast<int>(fx1),
          static_cast<int>(fy1)};
}

Patch crop_patch(const RgbImage& image, const PixelRect& rect) {
  Patch out(FrameDims(rect.width(), rect.height()));
  const std::size_t row_bytes = static_cast<std::size_t>(rect.width()) * 3;
  for (int y = 0; y < rect.height(); ++y) {
    const std::uint8_t* src = image.row(rect.y0 + y) + static_cast<std::size_t>(rect.x0) * 3;
    std::copy(src, src + row_bytes, out.row(y));
  }
  return out;
}

Patch crop_patch(const RgbImage& image, const Box& box) {
  return crop_patch(image, covering_rect(box, image.dims()));
}

GrayPatch to_gray(const Patch& patch) {
  GrayPatch out(patch.dims());
  auto dst = out.values();
  auto src = patch.bytes();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = luma({src[3 * i], src[3 * i + 1], src[3 * i + 2]});
  }
  return out;
}

GrayImage gray_region(const RgbImage& image, const PixelRect& rect) {
  GrayImage out(FrameDims(rect.width(), rect.height()));
  auto dst = out.values();
  std::size_t k = 0;
  for (int y = rect.y0; y < rect.y1; ++y) {
    const std::uint8_t* p = image.row(y) + static_cast<std::size_t>(rect.x0) * 3;
    for (int x = rect.x0; x < rect.x1; ++x, p += 3) dst[k++] = luma({p[0], p[1], p[2]});
  }
  return out;
}

Hsv to_hsv(Rgb pixel) {
  const double r = pixel.r / 255.0;
  const double g = pixel.g / 255.0;
  const double b = pixel.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) return out;  // achromatic: hue defined as 0
  double h;
  if (pixel.r >= pixel.g && pixel.r >= pixel.b) {
    h = 60.0 * std::fmod((g - b) / d, 6.0);
  } else if (pixel.g >= pixel.b) {
    h = 60.0 * ((b - r) / d + 2.0);
  } else {
    h = 60.0 * ((r - g) / d + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

GrayPatch resample(const GrayPatch& gray, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw std::invalid_argument("resample target must be >= 1x1");
  if (out_w == gray.width() && out_h == gray.height()) return gray;

  const int in_w = gray.width();
  const int in_h = gray.height();
  const double scale_x = static_cast<double>(in_w) / out_w;
  const double scale_y = static_cast<double>(in_h) / out_h;

  struct Tap {
    int i0, i1;
    double f;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> t(n_out);
    for (int o = 0; o < n_out; ++o) {
      const double s = std::clamp((o + 0.5) * scale - 0.5, 0.0, static_cast<double>(n_in - 1));
      const int i0 = static_cast<int>(std::floor(s));
      const int i1 = std::min(i0 + 1, n_in - 1);
      t[o] = {i0, i1, s - i0};
    }
    return t;
  };
  const auto xs = taps(out_w, in_w, scale_x);
  const auto ys = taps(out_h, in_h, scale_y);

  GrayPatch out(FrameDims(out_w, out_h));
  for (int y = 0; y < out_h; ++y) {
    const std::uint8_t* r0 = gray.row(ys[y].i0);
    const std::uint8_t* r1 = gray.row(ys[y].i1);
    const double fy = ys[y].f;
    for (int x = 0; x < out_w; ++x) {
      const Tap& tx = xs[x];
      const double top = r0[tx.i0] + tx.f * (r0[tx.i1] - r0[tx.i0]);
      const double bot = r1[tx.i0] + tx.f * (r1[tx.i1] - r1[tx.i0]);
      const double v = top + fy * (bot - top);
      out.set(x, y, static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)));
    }
  }
  return out;
}

Rgb label_color(std::string_view label) {
  if (label == "pred" || label == "track") return {0, 220, 0};
  if (label == "gt") return {0, 80, 255};
  if (label == "held") return {255, 210, 0};
  if (label == "detection") return {255, 0, 255};
  static constexpr std::array<Rgb, 6> palette{{{255, 64, 64},
                                               {64, 255, 255},
                                               {255, 128, 0},
                                               {160, 64, 255},
                                               {255, 255, 255},
                                               {128, 255, 128}}};
  std::uint32_t h = 2166136261u;  // FNV-1a
  for (char c : label) h = (h ^ static_cast<std::uint8_t>(c)) * 16777619u;
  return palette[h % palette.size()];
}

void draw_outline(RgbImage& image, const Box& box, Rgb color, int thickness) {
  PixelRect r;
  try {
    r = covering_rect(box, image.dims());
  } catch (const std::out_of_range&) {
    return;
  }
  const int t = std::max(1, thickness);
  for (int y = r.y0; y < r.y1; ++y) {
    const bool edge_row = y < r.y0 + t || y >= r.y1 - t;
    for (int x = r.x0; x < r.x1; ++x) {
      if (edge_row || x < r.x0 + t || x >= r.x1 - t) image.set(x, y, color);
    }
  }
}

void write_annotated(const Frame& frame, std::span<const LabeledBox> boxes,
                     const std::filesystem::path& path) {
  RgbImage canvas = frame.image;
  for (const LabeledBox& lb : boxes) draw_outline(canvas, lb.box, label_color(lb.label));
  write_ppm(path, canvas);
}

}  // namespace edgedam
