#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "edgedam/geometry.hpp"
#include "edgedam/media.hpp"

namespace edgedam {

struct Detection {
  Box box;
  double score = 0.0;

  bool operator==(const Detection&) const = default;
};

struct DetectionSet {
  std::int64_t t = 0;
  std::vector<Detection> detections;

  std::size_t size() const { return detections.size(); }
  bool empty() const { return detections.empty(); }
  bool operator==(const DetectionSet&) const = default;
};

/// Boxes are returned in full-frame coordinates. With an ROI, every returned
/// box intersects it.
class DetectorInterface {
 public:
  virtual ~DetectorInterface() = default;
  virtual DetectionSet detect(const Frame& frame, const std::optional<Box>& roi) = 0;
};

/// Replays per-frame detections keyed by frame index.
class ScriptedDetector : public DetectorInterface {
 public:
  ScriptedDetector() = default;
  explicit ScriptedDetector(std::map<std::int64_t, std::vector<Detection>> script)
      : script_(std::move(script)) {}

  DetectionSet detect(const Frame& frame, const std::optional<Box>& roi) override;
  DetectionSet detect(std::int64_t t, const std::optional<Box>& roi) const;

  const std::map<std::int64_t, std::vector<Detection>>& script() const { return script_; }

 private:
  std::map<std::int64_t, std::vector<Detection>> script_;
};

struct SourceConfig {
  double tau_s = 0.45;
  double nms_iou = 0.50;
  int stride_delta = 3;
  double kappa = 2.0;

  void validate() const;
};

DetectionSet filter_confident(const DetectionSet& dets, double tau_s);

/// Greedy suppression in descending score order; equal scores keep list order.
DetectionSet nms(const DetectionSet& dets, double iou_thresh);

struct Schedule {
  bool run_detection = false;
  bool full_frame = false;

  bool operator==(const Schedule&) const = default;
};

Schedule schedule(std::int64_t t, int delta, bool occ_prev);

/// Runs the detector per `sched` (ROI around `prev_box` unless full-frame),
/// then filters and suppresses. Reuses `last_set` when detection is skipped.
DetectionSet provide(DetectorInterface& detector, const Frame& frame, const Box& prev_box,
                     Schedule sched, const DetectionSet& last_set, const SourceConfig& cfg);

}  // namespace edgedam
