#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include "edgedam/geometry.hpp"
#include "edgedam/media.hpp"

namespace testutil {

/// Random RGB texture; every pixel independent.
inline edgedam::RgbImage noise_image(int w, int h, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> d(0, 255);
  edgedam::RgbImage img(edgedam::FrameDims(w, h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.set(x, y, {static_cast<std::uint8_t>(d(gen)), static_cast<std::uint8_t>(d(gen)),
                     static_cast<std::uint8_t>(d(gen))});
    }
  }
  return img;
}

/// Smooth texture: a sum of a few sinusoids, so optical flow has gradients to
/// work with.
inline edgedam::RgbImage smooth_texture(int w, int h, double phase = 0.0) {
  edgedam::RgbImage img(edgedam::FrameDims(w, h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = 128 + 50 * std::sin(0.21 * x + phase) * std::cos(0.17 * y) +
                       40 * std::sin(0.09 * (x + 2 * y) + 1.3);
      const auto g = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      img.set(x, y, {g, static_cast<std::uint8_t>(g / 2 + 60), static_cast<std::uint8_t>(200 - g / 2)});
    }
  }
  return img;
}

/// Copies `src` into `dst` with its top-left at (ox, oy), clipped.
inline void paste(edgedam::RgbImage& dst, const edgedam::RgbImage& src, int ox, int oy) {
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const int tx = ox + x, ty = oy + y;
      if (tx >= 0 && ty >= 0 && tx < dst.width() && ty < dst.height()) dst.set(tx, ty, src.at(x, y));
    }
  }
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("edgedam_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil
