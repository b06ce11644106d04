#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgedam/geometry.hpp"

namespace edgedam {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

struct Hsv {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;  // [0, 1]
  double v = 0.0;  // [0, 1]
};

/// Row-major interleaved 8-bit RGB raster.
class RgbImage {
 public:
  RgbImage() = default;
  explicit RgbImage(FrameDims dims, Rgb fill = {});
  RgbImage(FrameDims dims, std::vector<std::uint8_t> bytes);

  FrameDims dims() const { return dims_; }
  int width() const { return dims_.width(); }
  int height() const { return dims_.height(); }

  Rgb at(int x, int y) const {
    const std::uint8_t* p = &data_[offset(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) {
    std::uint8_t* p = &data_[offset(x, y)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }
  const std::uint8_t* row(int y) const { return &data_[offset(0, y)]; }
  std::uint8_t* row(int y) { return &data_[offset(0, y)]; }

  bool operator==(const RgbImage&) const = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * dims_.width() + x) * 3;
  }

  FrameDims dims_;
  std::vector<std::uint8_t> data_ = std::vector<std::uint8_t>(3, 0);
};

/// Row-major 8-bit single-channel raster.
class GrayImage {
 public:
  GrayImage() = default;
  explicit GrayImage(FrameDims dims, std::uint8_t fill = 0);
  GrayImage(FrameDims dims, std::vector<std::uint8_t> values);

  FrameDims dims() const { return dims_; }
  int width() const { return dims_.width(); }
  int height() const { return dims_.height(); }

  std::uint8_t at(int x, int y) const { return data_[static_cast<std::size_t>(y) * dims_.width() + x]; }
  void set(int x, int y, std::uint8_t v) { data_[static_cast<std::size_t>(y) * dims_.width() + x] = v; }

  std::span<const std::uint8_t> values() const { return data_; }
  std::span<std::uint8_t> values() { return data_; }
  const std::uint8_t* row(int y) const { return &data_[static_cast<std::size_t>(y) * dims_.width()]; }

  bool operator==(const GrayImage&) const = default;

 private:
  FrameDims dims_;
  std::vector<std::uint8_t> data_ = std::vector<std::uint8_t>(1, 0);
};

struct Frame {
  RgbImage image;
  std::int64_t index = 0;

  FrameDims dims() const { return image.dims(); }
};

using Patch = RgbImage;
using GrayPatch = GrayImage;

/// Integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 1;
  int y1 = 1;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  Box box() const { return Box::from_corners(x0, y0, x1, y1); }
};

/// Covering integer grid of `box` (floor origin, ceil extent) intersected with
/// the frame. Throws std::out_of_range when nothing remains.
PixelRect covering_rect(const Box& box, FrameDims frame);

Patch crop_patch(const RgbImage& image, const Box& box);
inline Patch crop_patch(const Frame& frame, const Box& box) { return crop_patch(frame.image, box); }
Patch crop_patch(const RgbImage& image, const PixelRect& rect);

/// BT.601 luma, rounded half-up.
inline std::uint8_t luma(Rgb c) {
  return static_cast<std::uint8_t>((299u * c.r + 587u * c.g + 114u * c.b + 500u) / 1000u);
}

GrayPatch to_gray(const Patch& patch);
/// Luma of `rect` taken straight from an RGB image.
GrayImage gray_region(const RgbImage& image, const PixelRect& rect);
Hsv to_hsv(Rgb pixel);

/// Bilinear resampling on pixel centres. Throws std::invalid_argument when an
/// output side is below one.
GrayPatch resample(const GrayPatch& gray, int out_w, int out_h);

// Binary PNM (P6 colour, P5 gray expanded to RGB), maxval 255.
RgbImage read_pnm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
RgbImage decode_pnm(std::span<const std::uint8_t> bytes, const std::string& name);
std::vector<std::uint8_t> encode_ppm(const RgbImage& image);

/// Random-access source of frames sharing one size.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::size_t size() const = 0;
  virtual FrameDims dims() const = 0;
  virtual Frame frame(std::size_t t) const = 0;
};

/// Image sequence on disk. Files are ordered lexicographically; every file must
/// match the size of the first.
class SequenceReader : public FrameSource {
 public:
  explicit SequenceReader(const std::filesystem::path& dir);

  std::size_t size() const override { return files_.size(); }
  FrameDims dims() const override { return dims_; }
  Frame frame(std::size_t t) const override;
  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::vector<std::filesystem::path> files_;
  FrameDims dims_;
};

/// Reads and validates an entire sequence.
std::vector<Frame> load_sequence(const std::filesystem::path& dir);

struct LabeledBox {
  Box box;
  std::string label;
};

Rgb label_color(std::string_view label);
/// Outline drawn inside the box's covering rectangle, clipped to the image.
void draw_outline(RgbImage& image, const Box& box, Rgb color, int thickness = 2);
void write_annotated(const Frame& frame, std::span<const LabeledBox> boxes,
                     const std::filesystem::path& path);

}  // namespace edgedam
