#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "edgedam/geometry.hpp"
#include "edgedam/media.hpp"

namespace edgedam {

inline constexpr int kDescriptorPatchSide = 16;
inline constexpr int kHueBins = 16;
inline constexpr int kSaturationBins = 16;
inline constexpr std::size_t kGrayLength = kDescriptorPatchSide * kDescriptorPatchSide;
inline constexpr std::size_t kHistogramLength = kHueBins * kSaturationBins;
inline constexpr std::size_t kDescriptorLength = kGrayLength + kHistogramLength;

/// Compact appearance vector: a 16x16 luma patch followed by a 16x16
/// hue-saturation histogram. Entries are non-negative; the whole vector has
/// unit l2 norm.
class Descriptor {
 public:
  Descriptor() = default;
  explicit Descriptor(std::vector<double> values) : values_(std::move(values)) {}

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double norm() const;

  std::span<const double> gray_part() const { return values().first(kGrayLength); }
  std::span<const double> histogram_part() const { return values().subspan(kGrayLength); }

  /// FNV-1a over the values quantised to 1e-9, stable across platforms.
  std::uint64_t checksum() const;

  bool operator==(const Descriptor&) const = default;

 private:
  std::vector<double> values_;
};

/// Flat index hue_bin * 16 + saturation_bin.
int hsv_bin(Rgb pixel);
/// Hue-saturation histogram over every patch pixel, normalised to sum 1.
std::array<double, kHistogramLength> hsv_histogram(const Patch& patch);

/// Descriptor of the image content inside `box`. Throws std::out_of_range when
/// the box misses the image.
Descriptor compute_descriptor(const RgbImage& image, const Box& box);
inline Descriptor compute_descriptor(const Frame& frame, const Box& box) {
  return compute_descriptor(frame.image, box);
}

/// Cosine similarity; 0 when either vector has zero norm. Throws
/// std::invalid_argument on a length mismatch.
double cosine(std::span<const double> a, std::span<const double> b);
inline double cosine(const Descriptor& a, const Descriptor& b) {
  return cosine(a.values(), b.values());
}

/// Zero-mean NCC score for every integer placement of `templ` inside `region`.
struct NccScores {
  int cols = 0;
  int rows = 0;
  std::vector<double> scores;

  double at(int ox, int oy) const { return scores[static_cast<std::size_t>(oy) * cols + ox]; }
};

/// Placements whose window or template has zero variance score 0. Throws
/// std::invalid_argument when the template exceeds the region.
NccScores ncc_map(const GrayImage& region, const GrayImage& templ);

struct NccMatch {
  Box box;
  double score = 0.0;
};

/// Exhaustive stride-1 template search over the part of `region` inside the
/// frame. Ties go to the first placement in raster order.
NccMatch ncc_search(const RgbImage& image, const GrayPatch& templ, const Box& region);
inline NccMatch ncc_search(const Frame& frame, const GrayPatch& templ, const Box& region) {
  return ncc_search(frame.image, templ, region);
}

}  // namespace edgedam
