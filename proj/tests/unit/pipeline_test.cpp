#include <cmath>

#include "doctest.h"
#include "edgedam/eval.hpp"
#include "edgedam/formats.hpp"
#include "edgedam/pipeline.hpp"
#include "edgedam/synth.hpp"
#include "helpers.hpp"

using namespace edgedam;

namespace {

ScenarioSpec clean_spec(std::int64_t length) {
  ScenarioSpec s;
  s.name = "clean";
  s.dims = FrameDims(320, 240);
  s.length = length;
  s.seed = 77;
  s.target.color = {200, 60, 40};
  s.target.width = 40;
  s.target.height = 40;
  s.target.path = {{0, {50, 120}}, {length - 1, {50 + 3.0 * (length - 1), 120}}};
  s.noise = {0.0, 0.0, 0.0, 0.0, 0};
  return s;
}

/// Target patch on a smooth background, plus the box it occupies.
struct Staged {
  RgbImage image;
  Box box;
};

Staged staged_frame(int tx, int ty) {
  Staged s{testutil::smooth_texture(240, 200), Box(tx, ty, kTemplateSide, kTemplateSide)};
  testutil::paste(s.image, testutil::noise_image(kTemplateSide, kTemplateSide, 404), tx, ty);
  return s;
}

}  // namespace

TEST_CASE("occlusion set") {
  const Box prev(0, 0, 10, 10);
  CHECK(detect_occlusion_set(DetectionSet{}, prev, 0.4).empty());
  const DetectionSet one{0, {{Box(1, 0, 10, 10), 0.9}}};
  CHECK(detect_occlusion_set(one, prev, 0.4).size() == 1);
  const DetectionSet three{0, {{Box(0, 0, 10, 5), 0.9}, {Box(0, 0, 10, 4.5), 0.8}, {Box(50, 50, 10, 10), 0.9}}};
  CHECK(detect_occlusion_set(three, prev, 0.4).size() == 2);
}

TEST_CASE("switch condition") {
  const PipelineConfig cfg;
  const Box prev(0, 0, 30, 40);
  CHECK(compute_switch(0.34, prev.translated({1, 0}), prev, 0, cfg));
  CHECK_FALSE(compute_switch(0.9, prev.translated({5, 0}), prev, 0, cfg));
  CHECK(compute_switch(0.9, prev, prev, 2, cfg));
  CHECK(compute_switch(0.9, prev.translated({20, 0}), prev, 0, cfg));
  CHECK_FALSE(compute_switch(0.35, prev, prev, 1, cfg));
}

TEST_CASE("held box update") {
  const FrameDims dims(640, 480);
  const Box prev(100, 100, 40, 40);
  const Box moved = update_held(prev, {3, -2}, {}, 0.3, dims);
  CHECK(moved.center() == Point2{123, 118});
  CHECK(moved.w() == 40);
  CHECK(moved.h() == 40);

  const std::vector<Box> o{Box(90, 90, 30, 30), Box(120, 120, 30, 30)};
  const Box grown = update_held(prev, {0, 0}, o, 0.3, dims);
  CHECK(grown.w() == doctest::Approx(46));
  CHECK(grown.h() == doctest::Approx(46));
  CHECK(grown.center() == prev.center());

  const std::vector<Box> self{prev};
  CHECK(update_held(prev, {0, 0}, self, 0.3, dims) == prev);

  const Box edge = update_held(Box(610, 100, 20, 20), {30, 0}, {}, 0.3, dims);
  CHECK(inside_frame(edge, dims));
}

TEST_CASE("motion prior") {
  const Box a(0, 0, 10, 10);
  CHECK(motion_prior(a, a.center(), 14.0) == 1.0);
  CHECK(motion_prior(a, a.center() + Vec2{3, 4}, 5.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(motion_prior(a, a.center() + Vec2{1e6, 0}, 5.0) < 1e-12);
  CHECK_THROWS_AS(motion_prior(a, a.center(), 0.0), std::invalid_argument);
}

TEST_CASE("session init") {
  const Staged s = staged_frame(50, 60);
  const Frame f{s.image, 0};
  ScriptedDetector det;
  TrackingSession a(PipelineConfig{}, det);
  const TrackOutput out = a.init(f, s.box);
  CHECK(out.box == s.box);
  CHECK(a.state().estimate == s.box);
  CHECK(a.state().mode == Mode::Normal);
  CHECK(a.state().velocity == Vec2{});
  CHECK(a.memory().ram().size() == 1);
  CHECK_THROWS_AS(a.init(f, Box(230, 10, 30, 30)), std::invalid_argument);
  CHECK_THROWS_AS(a.step(Frame{s.image, 5}), std::invalid_argument);

  TrackingSession b(PipelineConfig{}, det);
  b.init(f, s.box);
  TrackingSession c(PipelineConfig{}, det);
  c.init(f, s.box);
  CHECK(b.state().last_verified_descriptor == c.state().last_verified_descriptor);
  CHECK(b.state().last_verified_template == c.state().last_verified_template);

  const TrackOutput next = c.step(Frame{s.image, 1});
  CHECK(next.mode == Mode::Normal);
  CHECK(next.box == s.box);
  CHECK_FALSE(next.switched);

  TrackingSession fresh(PipelineConfig{}, det);
  CHECK_THROWS_AS(fresh.step(f), std::logic_error);
}

TEST_CASE("staged recovery") {
  const Staged start = staged_frame(50, 60);
  ScriptedDetector none;

  SUBCASE("stage 2 snaps to the matching detection") {
    TrackingSession session(PipelineConfig{}, none);
    session.init(Frame{start.image, 0}, start.box);
    const Staged later = staged_frame(90, 70);
    const DetectionSet dets{1, {{later.box, 0.9}, {Box(150, 20, 30, 30), 0.9}}};
    const auto rec = session.recover(Frame{later.image, 1}, dets, {start.box, later.box.center()});
    REQUIRE(rec);
    CHECK(rec->stage == RecoveryStage::SnapBack);
    CHECK(rec->box == later.box);
  }

  SUBCASE("stage 3 finds the template in the expanded region") {
    TrackingSession session(PipelineConfig{}, none);
    session.init(Frame{start.image, 0}, start.box);
    const Staged later = staged_frame(62, 66);
    const auto rec = session.recover(Frame{later.image, 1}, DetectionSet{1, {}},
                                     {start.box, start.box.center()});
    REQUIRE(rec);
    CHECK(rec->stage == RecoveryStage::Template);
    CHECK(rec->score > 0.95);
    CHECK(std::abs(rec->box.x() - 62) <= 1.0);
    CHECK(std::abs(rec->box.y() - 66) <= 1.0);
  }

  SUBCASE("stage 1 scores anchors") {
    TrackingSession session(PipelineConfig{}, none);
    session.init(Frame{start.image, 0}, start.box);
    DistractorAwareMemory& dam = session.memory();
    const Descriptor d = compute_descriptor(start.image, start.box);
    for (int t = 1; t <= 3; ++t) dam.ram_insert(start.box, d, t);
    REQUIRE(dam.try_promote(3));

    const Staged later = staged_frame(56, 60);
    const Point2 predicted = later.box.center();
    const auto rec = session.recover(Frame{later.image, 8}, DetectionSet{8, {}}, {later.box, predicted});
    REQUIRE(rec);
    CHECK(rec->stage == RecoveryStage::Anchor);
    CHECK(rec->box.center() == predicted);

    const DamConfig& c = session.config().dam;
    const Descriptor phi = compute_descriptor(later.image, later.box);
    const double oracle = c.lambda_iou * iou(start.box, later.box) + c.lambda_app * cosine(d, phi) +
                          c.lambda_mot * std::exp(-distance(start.box.center(), predicted) / later.box.diagonal()) +
                          c.lambda_time * std::exp(-c.alpha * 5.0);
    CHECK(rec->score == doctest::Approx(oracle).epsilon(1e-12));
  }

  SUBCASE("nothing matches") {
    TrackingSession session(PipelineConfig{}, none);
    session.init(Frame{start.image, 0}, start.box);
    const RgbImage flat(FrameDims(240, 200), Rgb{128, 128, 128});
    CHECK(!session.recover(Frame{flat, 1}, DetectionSet{1, {}}, {start.box, start.box.center()}));
  }
}

TEST_CASE("unobstructed target with perfect detections") {
  const Scenario sc(clean_spec(40));
  ScriptedDetector det(sc.detections());
  TrackingSession session(PipelineConfig{}, det);
  const auto& gt = sc.ground_truth();
  for (std::size_t t = 0; t < sc.size(); ++t) {
    const TrackOutput out = t == 0 ? session.init(sc.frame(t), *gt[0]) : session.step(sc.frame(t));
    CHECK(out.t == static_cast<std::int64_t>(t));
    CHECK(out.mode == Mode::Normal);
    CHECK(iou(out.box, *gt[t]) >= 0.8);
  }
}

TEST_CASE("full occlusion holds and then recovers") {
  ScenarioSpec spec = clean_spec(70);
  spec.occlusions = {OcclusionSpec{30, 10, {150, 150, 150}, 32}};
  const Scenario sc(spec);

  // Target detections outside the occlusion; inside it, two boxes over the
  // occluder around the target's hidden position.
  DetectionScript script;
  for (std::int64_t t = 0; t < spec.length; ++t) {
    const Box b = object_box(spec.target, t);
    if (!sc.occluded(t)) {
      script[t] = {{b, 0.9}};
    } else {
      script[t] = {{b.translated({-4, -3}), 0.8}, {b.translated({5, 4}), 0.7}};
    }
  }
  ScriptedDetector det(script);
  TrackingSession session(PipelineConfig{}, det);
  std::vector<TrackOutput> outs;
  for (std::size_t t = 0; t < sc.size(); ++t) {
    outs.push_back(t == 0 ? session.init(sc.frame(t), *sc.ground_truth()[0]) : session.step(sc.frame(t)));
  }
  for (std::int64_t t = 30; t < 40; ++t) {
    CAPTURE(t);
    CHECK(outs[t].mode == Mode::Holding);
    CHECK(outs[t].stage == RecoveryStage::Held);
  }
  CHECK(session.memory().negatives().size() > 0);

  const SequenceResult r = evaluate(outs, sc.ground_truth(), sc.events());
  REQUIRE(r.recoveries.size() == 1);
  CHECK(r.recoveries[0].recovered);
  CHECK(r.recoveries[0].latency <= 10);

  // Audit: every gated admission passed both clauses against its reference.
  for (const AdmissionRecord& rec : session.memory().admission_log()) {
    if (rec.admitted) {
      CHECK(rec.check.area_ok);
      if (!rec.bypass) CHECK(rec.check.iou >= session.config().dam.tau_in);
    }
  }
}

TEST_CASE("sessions are deterministic") {
  const ScenarioSpec spec = standard_suite()[4];
  const Scenario sc(spec);
  auto run = [&] {
    ScriptedDetector det(sc.detections());
    TrackingSession s(PipelineConfig{}, det);
    std::vector<TrackOutput> outs;
    for (std::size_t t = 0; t < sc.size(); ++t) {
      outs.push_back(t == 0 ? s.init(sc.frame(t), object_box(spec.target, 0)) : s.step(sc.frame(t)));
    }
    return outs;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == sc.size());
  CHECK(a == b);
  for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t].t == static_cast<std::int64_t>(t));
}
