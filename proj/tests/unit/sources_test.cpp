#include <random>

#include "doctest.h"
#include "edgedam/sources.hpp"

using namespace edgedam;

namespace {

DetectionSet set_of(std::vector<Detection> d, std::int64_t t = 0) { return DetectionSet{t, std::move(d)}; }

}  // namespace

TEST_CASE("confidence filter is inclusive") {
  const DetectionSet in = set_of({{Box(0, 0, 5, 5), 0.9}, {Box(1, 0, 5, 5), 0.45}, {Box(2, 0, 5, 5), 0.44}});
  const DetectionSet out = filter_confident(in, 0.45);
  REQUIRE(out.size() == 2);
  CHECK(out.detections[1].score == 0.45);
  CHECK(filter_confident(out, 0.45) == out);
  CHECK(filter_confident(set_of({}), 0.45).empty());
  CHECK(filter_confident(set_of({{Box(0, 0, 5, 5), 0.1}}), 0.45).empty());
}

TEST_CASE("greedy NMS") {
  const Box a(0, 0, 10, 10);
  CHECK(nms(set_of({{a, 0.8}, {a, 0.9}}), 0.5) == set_of({{a, 0.9}}));
  const DetectionSet disjoint = set_of({{Box(0, 0, 5, 5), 0.5}, {Box(50, 50, 5, 5), 0.7}});
  CHECK(nms(disjoint, 0.5).size() == 2);

  const Box A(0, 0, 10, 10), B(3, 0, 10, 10), C(6, 0, 10, 10);
  REQUIRE(iou(A, B) >= 0.5);
  REQUIRE(iou(B, C) >= 0.5);
  REQUIRE(iou(A, C) < 0.5);
  const DetectionSet chain = nms(set_of({{B, 0.8}, {C, 0.7}, {A, 0.9}}), 0.5);
  CHECK(chain == set_of({{A, 0.9}, {C, 0.7}}));

  std::mt19937 gen(9);
  std::uniform_real_distribution<double> pos(0, 60), size(5, 20), score(0, 1);
  for (int k = 0; k < 200; ++k) {
    std::vector<Detection> dets;
    for (int i = 0; i < 12; ++i) dets.push_back({Box(pos(gen), pos(gen), size(gen), size(gen)), score(gen)});
    const DetectionSet out = nms(set_of(dets), 0.5);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j)
        CHECK(iou(out.detections[i].box, out.detections[j].box) < 0.5);
  }
}

TEST_CASE("detection schedule") {
  CHECK(schedule(0, 3, false) == Schedule{true, false});
  CHECK(schedule(4, 3, false) == Schedule{false, false});
  CHECK(schedule(4, 3, true) == Schedule{true, true});
  for (int t = 0; t < 10; ++t) {
    CHECK(schedule(t, 1, false).run_detection);
    CHECK(schedule(t, 5, true) == Schedule{true, true});
  }
  CHECK_THROWS(schedule(0, 0, false));
}

TEST_CASE("provide") {
  const Frame frame{RgbImage(FrameDims(200, 200)), 4};
  ScriptedDetector det({{4, {{Box(150, 150, 20, 20), 0.9}, {Box(10, 10, 20, 20), 0.3}}}});
  const SourceConfig cfg;
  const DetectionSet last = set_of({{Box(1, 1, 2, 2), 0.99}}, 3);

  CHECK(provide(det, frame, Box(0, 0, 10, 10), {false, false}, last, cfg) == last);
  CHECK(provide(det, frame, Box(0, 0, 10, 10), {true, false}, last, cfg).empty());
  const DetectionSet full = provide(det, frame, Box(0, 0, 10, 10), {true, true}, last, cfg);
  REQUIRE(full.size() == 1);
  CHECK(full.t == 4);
  CHECK(full.detections[0].box == Box(150, 150, 20, 20));

  CHECK(det.detect(4, Box(0, 0, 15, 15)) == det.detect(4, Box(0, 0, 15, 15)));
  CHECK(det.detect(4, Box(0, 0, 15, 15)).size() == 1);
  CHECK(det.detect(7, std::nullopt).empty());
}
