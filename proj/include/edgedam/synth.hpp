#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgedam/geometry.hpp"
#include "edgedam/media.hpp"
#include "edgedam/sources.hpp"

namespace edgedam {

inline constexpr double kMaxSpeed = 5.0;

/// Object centre at a frame; positions between waypoints are linear.
struct Waypoint {
  std::int64_t frame = 0;
  Point2 center;
};

struct ObjectSpec {
  Rgb color;
  double texture_amplitude = 0.35;
  int width = 40;
  int height = 40;
  std::vector<Waypoint> path;
};

struct DistractorSpec {
  /// 0 keeps `object.color`; 1 takes the target's colour.
  double similarity = 0.5;
  ObjectSpec object;
};

struct OcclusionSpec {
  std::int64_t start = 0;
  std::int64_t duration = 1;
  Rgb color{150, 150, 150};
  int margin = 32;

  std::int64_t end() const { return start + duration; }
};

struct DetectionNoise {
  double center_sigma = 1.0;
  double size_sigma = 1.0;
  /// Probability of one false positive per frame.
  double false_positive_rate = 0.05;
  /// Target miss probability outside occlusions.
  double miss_rate = 0.02;
  /// Frames after each occlusion in which the target is detected only with a
  /// score below the usual confidence threshold.
  int weak_frames_after_occlusion = 0;
};

/// Slow white-balance drift: channel c is scaled by
/// 1 + amplitude * sin(2 pi t / period + 2 pi c / 3).
struct LightingDrift {
  double amplitude = 0.0;
  double period = 90.0;
};

struct ScenarioSpec {
  std::string name;
  FrameDims dims{640, 480};
  std::int64_t length = 1;
  std::uint64_t seed = 0;
  ObjectSpec target;
  std::vector<DistractorSpec> distractors;
  std::vector<OcclusionSpec> occlusions;
  DetectionNoise noise;
  LightingDrift lighting;
};

/// Occluded interval [start, end).
struct OcclusionEvent {
  std::int64_t start = 0;
  std::int64_t end = 0;

  bool operator==(const OcclusionEvent&) const = default;
};

Point2 position_at(const std::vector<Waypoint>& path, std::int64_t t);
/// Pixel-aligned box of an object at frame t.
Box object_box(const ObjectSpec& obj, std::int64_t t);

/// Throws std::invalid_argument naming the first offending frame.
void validate_spec(const ScenarioSpec& spec);

/// Lazily rendered scenario; every frame is a pure function of the spec.
class Scenario : public FrameSource {
 public:
  explicit Scenario(ScenarioSpec spec);

  std::size_t size() const override { return static_cast<std::size_t>(spec_.length); }
  FrameDims dims() const override { return spec_.dims; }
  Frame frame(std::size_t t) const override;

  const ScenarioSpec& spec() const { return spec_; }
  /// Empty on occluded frames.
  const std::vector<std::optional<Box>>& ground_truth() const { return gt_; }
  const std::map<std::int64_t, std::vector<Detection>>& detections() const { return dets_; }
  std::vector<OcclusionEvent> events() const;
  bool occluded(std::int64_t t) const;

 private:
  RgbImage render_object(const ObjectSpec& obj, Rgb color, std::uint64_t stream) const;
  void script_detections();

  ScenarioSpec spec_;
  RgbImage background_;
  RgbImage target_sprite_;
  std::vector<RgbImage> distractor_sprites_;
  std::vector<std::optional<Box>> gt_;
  std::map<std::int64_t, std::vector<Detection>> dets_;
};

/// Fixed 30-scenario suite: 1-3 distractors by 1-3 occlusions, four variants
/// of colour similarity and detector noise.
std::vector<ScenarioSpec> standard_suite();

inline constexpr const char* kSuiteVersion = "edgedam-suite-1";

/// frames/ (PPM), detections.jsonl, gt.jsonl, events.json and spec.json.
void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

}  // namespace edgedam
