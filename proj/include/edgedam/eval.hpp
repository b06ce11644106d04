#pragma once

#include <optional>
#include <vector>

#include "edgedam/geometry.hpp"
#include "edgedam/pipeline.hpp"
#include "edgedam/synth.hpp"

namespace edgedam {

inline constexpr double kRobustnessIou = 0.1;
inline constexpr double kRecoveryIou = 0.5;
inline constexpr int kRecoveryWindow = 30;

struct RecoveryEvent {
  std::int64_t reappear = 0;
  bool recovered = false;
  int latency = 0;  // frames after reappearance; valid when recovered
};

struct SequenceResult {
  /// Empty on frames whose ground truth is occluded.
  std::vector<std::optional<double>> iou;
  std::vector<Mode> modes;
  std::vector<RecoveryEvent> recoveries;
  std::vector<double> frame_seconds;
};

/// Per-frame IoU of predictions against ground truth. Throws
/// std::invalid_argument when the lengths differ.
std::vector<std::optional<double>> iou_trace(const std::vector<Box>& pred,
                                             const std::vector<std::optional<Box>>& gt);

/// Mean over scored frames; throws std::invalid_argument when none are scored.
double mean_iou(const std::vector<std::optional<double>>& iou);
/// Fraction of scored frames with IoU above the threshold.
double robustness(const std::vector<std::optional<double>>& iou, double tau_rob = kRobustnessIou);

std::vector<RecoveryEvent> recovery_events(const std::vector<std::optional<double>>& iou,
                                           const std::vector<OcclusionEvent>& events,
                                           int l_max = kRecoveryWindow,
                                           double tau = kRecoveryIou);

struct RecoveryStats {
  double rate = 0.0;
  double mean_latency = 0.0;    // over recovered events; 0 when none
  double median_latency = 0.0;  // over recovered events; 0 when none
  int events = 0;
  int recovered = 0;
};

/// Throws std::invalid_argument when there are no events.
RecoveryStats recovery_stats(const std::vector<RecoveryEvent>& events);

struct Throughput {
  double fps = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  long long frames = 0;
  double total_seconds = 0.0;
};

Throughput throughput(const std::vector<double>& frame_seconds);

SequenceResult evaluate(const std::vector<TrackOutput>& outputs,
                        const std::vector<std::optional<Box>>& gt,
                        const std::vector<OcclusionEvent>& events,
                        std::vector<double> frame_seconds = {});

}  // namespace edgedam
