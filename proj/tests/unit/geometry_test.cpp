#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "edgedam/geometry.hpp"

using namespace edgedam;

namespace {

// Counts unit cells of the integer grid covered by both boxes.
long long raster_intersection(const Box& a, const Box& b) {
  long long n = 0;
  for (int y = -2; y < 80; ++y) {
    for (int x = -2; x < 80; ++x) {
      const bool in_a = x >= a.x() && x + 1 <= a.right() && y >= a.y() && y + 1 <= a.bottom();
      const bool in_b = x >= b.x() && x + 1 <= b.right() && y >= b.y() && y + 1 <= b.bottom();
      n += in_a && in_b;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("iou on reference pairs") {
  CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == doctest::Approx(1.0));
  CHECK(iou({0, 0, 10, 10}, {20, 20, 5, 5}) == 0.0);
  CHECK(iou({0, 0, 2, 2}, {1, 1, 2, 2}) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("iou agrees with a raster count on integer boxes") {
  std::mt19937 gen(7);
  std::uniform_int_distribution<int> pos(0, 40), size(1, 30);
  for (int k = 0; k < 300; ++k) {
    const Box a(pos(gen), pos(gen), size(gen), size(gen));
    const Box b(pos(gen), pos(gen), size(gen), size(gen));
    const double inter = static_cast<double>(raster_intersection(a, b));
    const double expected = inter / (area(a) + area(b) - inter);
    CHECK(iou(a, b) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(iou(a, b) == doctest::Approx(iou(b, a)).epsilon(1e-15));
    CHECK(iou(a, b) >= 0.0);
    CHECK(iou(a, b) <= 1.0);
  }
}

TEST_CASE("area and box validation") {
  CHECK(area({0, 0, 10, 10}) == 100);
  CHECK(area({5, 5, 1, 1}) == 1);
  CHECK(area({0, 0, 3, 7}) == 21);
  CHECK_THROWS_AS(Box(0, 0, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(Box(0, 0, 5, -1), std::invalid_argument);
  CHECK_THROWS_AS(Box(NAN, 0, 5, 5), std::invalid_argument);
}

TEST_CASE("union_bbox") {
  const std::vector<Box> one{{0, 0, 2, 2}};
  CHECK(union_bbox(one) == Box(0, 0, 2, 2));
  const std::vector<Box> two{{0, 0, 2, 2}, {3, 3, 2, 2}};
  CHECK(union_bbox(two) == Box(0, 0, 5, 5));
  const std::vector<Box> nested{{1, 1, 1, 1}, {0, 0, 4, 4}};
  CHECK(union_bbox(nested) == Box(0, 0, 4, 4));
  CHECK_THROWS_AS(union_bbox(std::vector<Box>{}), std::invalid_argument);
}

TEST_CASE("roi_crop") {
  const FrameDims f(640, 480);
  CHECK(roi_crop({100, 100, 40, 60}, 2.0, f) == Box(80, 70, 80, 120));
  CHECK(roi_crop({0, 0, 10, 10}, 1.0, f) == Box(0, 0, 10, 10));
  CHECK(roi_crop({5, 5, 40, 40}, 2.0, f) == Box(0, 0, 65, 65));
  CHECK_THROWS_AS(roi_crop({0, 0, 10, 10}, 0.5, f), std::invalid_argument);
}

TEST_CASE("to_frame_coords") {
  CHECK(to_frame_coords({10, 10, 5, 5}, {80, 70, 80, 120}) == Box(90, 80, 5, 5));
  CHECK(to_frame_coords({10, 10, 5, 5}, {0, 0, 80, 120}) == Box(10, 10, 5, 5));
  CHECK(to_frame_coords({0, 0, 1, 1}, {3, 4, 9, 9}) == Box(3, 4, 1, 1));
}

TEST_CASE("norm_displacement") {
  CHECK(norm_displacement({0, 0, 10, 10}, {0, 0, 10, 10}) == 0.0);
  // 30x40 box has a 50 px diagonal.
  CHECK(norm_displacement({5, 0, 30, 40}, {0, 0, 30, 40}) == doctest::Approx(0.1));
  CHECK(norm_displacement({8, 0, 8, 8}, {0, 0, 8, 8}) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("clamp_to_frame keeps at least one pixel") {
  const FrameDims f(100, 50);
  CHECK(clamp_to_frame({-10, -10, 30, 30}, f) == Box(0, 0, 20, 20));
  CHECK(clamp_to_frame({90, 40, 30, 30}, f) == Box(90, 40, 10, 10));
  const Box far = clamp_to_frame({500, 500, 10, 10}, f);
  CHECK(far.w() >= 1.0);
  CHECK(far.h() >= 1.0);
  CHECK(inside_frame(far, f));
  CHECK(inside_frame({0, 0, 100, 50}, f));
  CHECK_FALSE(inside_frame({0, 0, 101, 50}, f));
}
