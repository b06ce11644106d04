#include "edgedam/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace edgedam {

namespace {

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void scale_to_unit(std::span<double> v) {
  const double n = l2(v);
  if (n <= 0.0) return;
  for (double& x : v) x /= n;
}

}  // namespace

double Descriptor::norm() const { return l2(values_); }

std::uint64_t Descriptor::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : values_) {
    const auto q = static_cast<std::int64_t>(std::llround(v * 1e9));
    auto u = static_cast<std::uint64_t>(q);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

int hsv_bin(Rgb pixel) {
  const Hsv c = to_hsv(pixel);
  const int hb = std::min(kHueBins - 1, static_cast<int>(c.h / 360.0 * kHueBins));
  const int sb = std::min(kSaturationBins - 1, static_cast<int>(c.s * kSaturationBins));
  return hb * kSaturationBins + sb;
}

std::array<double, kHistogramLength> hsv_histogram(const Patch& patch) {
  std::array<double, kHistogramLength> hist{};
  const auto px = patch.bytes();
  const std::size_t n = px.size() / 3;
  for (std::size_t i = 0; i < n; ++i) {
    hist[hsv_bin({px[3 * i], px[3 * i + 1], px[3 * i + 2]})] += 1.0;
  }
  for (double& v : hist) v /= static_cast<double>(n);
  return hist;
}

Descriptor compute_descriptor(const RgbImage& image, const Box& box) {
  const Patch patch = crop_patch(image, box);
  const GrayPatch small = resample(to_gray(patch), kDescriptorPatchSide, kDescriptorPatchSide);

  std::vector<double> values(kDescriptorLength, 0.0);
  const auto gray = small.values();
  for (std::size_t i = 0; i < kGrayLength; ++i) values[i] = gray[i] / 255.0;
  const auto hist = hsv_histogram(patch);
  std::copy(hist.begin(), hist.end(), values.begin() + kGrayLength);

  // Each half is brought to unit length first so the 256 luma samples cannot
  // swamp the histogram, whose mass is at most 1.
  std::span<double> all(values);
  scale_to_unit(all.first(kGrayLength));
  scale_to_unit(all.subspan(kGrayLength));
  scale_to_unit(all);
  return Descriptor(std::move(values));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine of vectors with different lengths");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

NccScores ncc_map(const GrayImage& region, const GrayImage& templ) {
  const int tw = templ.width();
  const int th = templ.height();
  const int rw = region.width();
  const int rh = region.height();
  if (tw > rw || th > rh) throw std::invalid_argument("NCC template larger than search region");

  NccScores out;
  out.cols = rw - tw + 1;
  out.rows = rh - th + 1;
  out.scores.assign(static_cast<std::size_t>(out.cols) * out.rows, 0.0);

  // All sums below are integers well under 2^53, so they are exact in
  // double precision and independent of summation order.
  const long long n = static_cast<long long>(tw) * th;
  long long st = 0;
  long long sst = 0;
  for (std::uint8_t v : templ.values()) {
    st += v;
    sst += static_cast<long long>(v) * v;
  }
  const long long var_t = n * sst - st * st;
  if (var_t == 0) return out;

  std::vector<double> coeff(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    coeff[i] = static_cast<double>(n * templ.values()[i] - st);
  }

  // Integral images of the region for window sums.
  const int iw = rw + 1;
  std::vector<long long> sum(static_cast<std::size_t>(iw) * (rh + 1), 0);
  std::vector<long long> sq(sum.size(), 0);
  for (int y = 0; y < rh; ++y) {
    long long rs = 0;
    long long rq = 0;
    const std::uint8_t* r = region.row(y);
    for (int x = 0; x < rw; ++x) {
      rs += r[x];
      rq += static_cast<long long>(r[x]) * r[x];
      sum[(y + 1) * iw + x + 1] = sum[y * iw + x + 1] + rs;
      sq[(y + 1) * iw + x + 1] = sq[y * iw + x + 1] + rq;
    }
  }
  auto box_sum = [iw](const std::vector<long long>& s, int x0, int y0, int x1, int y1) {
    return s[y1 * iw + x1] - s[y0 * iw + x1] - s[y1 * iw + x0] + s[y0 * iw + x0];
  };

  std::vector<double> pix(static_cast<std::size_t>(rw) * rh);
  for (std::size_t i = 0; i < pix.size(); ++i) pix[i] = region.values()[i];

  std::vector<double> acc(static_cast<std::size_t>(out.cols));
  for (int oy = 0; oy < out.rows; ++oy) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j = 0; j < th; ++j) {
      const double* src_row = &pix[static_cast<std::size_t>(oy + j) * rw];
      const double* c_row = &coeff[static_cast<std::size_t>(j) * tw];
      for (int i = 0; i < tw; ++i) {
        const double c = c_row[i];
        const double* s = src_row + i;
        for (int ox = 0; ox < out.cols; ++ox) acc[ox] += c * s[ox];
      }
    }
    for (int ox = 0; ox < out.cols; ++ox) {
      const long long s = box_sum(sum, ox, oy, ox + tw, oy + th);
      const long long q = box_sum(sq, ox, oy, ox + tw, oy + th);
      const long long var_w = n * q - s * s;
      if (var_w == 0) continue;
      const double score =
          acc[ox] / std::sqrt(static_cast<double>(var_t) * static_cast<double>(var_w));
      out.scores[static_cast<std::size_t>(oy) * out.cols + ox] = std::clamp(score, -1.0, 1.0);
    }
  }
  return out;
}

NccMatch ncc_search(const RgbImage& image, const GrayPatch& templ, const Box& region) {
  const PixelRect rect = covering_rect(region, image.dims());
  const GrayImage gray = gray_region(image, rect);
  const NccScores map = ncc_map(gray, templ);

  int best_x = 0;
  int best_y = 0;
  double best = map.at(0, 0);
  for (int oy = 0; oy < map.rows; ++oy) {
    for (int ox = 0; ox < map.cols; ++ox) {
      if (map.at(ox, oy) > best) {
        best = map.at(ox, oy);
        best_x = ox;
        best_y = oy;
      }
    }
  }
  return {Box(rect.x0 + best_x, rect.y0 + best_y, templ.width(), templ.height()), best};
}

}  // namespace edgedam
