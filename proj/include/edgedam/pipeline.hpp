#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "edgedam/appearance.hpp"
#include "edgedam/config.hpp"
#include "edgedam/dam.hpp"
#include "edgedam/motion.hpp"
#include "edgedam/sources.hpp"
#include "edgedam/tracker.hpp"

namespace edgedam {

enum class Mode { Normal, Holding };

const char* mode_name(Mode m);

/// 0 = no recovery ran, 1-3 = the stage that succeeded, Held = all failed.
enum class RecoveryStage { None = 0, Anchor = 1, SnapBack = 2, Template = 3, Held = 4 };

struct PipelineState {
  Mode mode = Mode::Normal;
  std::int64_t t = 0;
  Box estimate;
  std::optional<Box> held;
  Vec2 velocity;
  bool occ_flag = false;
  /// Set when a run without the held box loses the target; forces full-frame
  /// detection like occ_flag does.
  bool lost = false;
  DetectionSet last_detections;
  Descriptor last_verified_descriptor;
  GrayPatch last_verified_template;
  Box last_verified_box;
};

struct TrackOutput {
  std::int64_t t = 0;
  Box box;
  Mode mode = Mode::Normal;
  double confidence = 0.0;
  int o_count = 0;
  bool switched = false;
  RecoveryStage stage = RecoveryStage::None;

  bool operator==(const TrackOutput&) const = default;
};

std::vector<Box> detect_occlusion_set(const DetectionSet& dets, const Box& prev, double tau_occ);

bool compute_switch(double conf, const Box& b_trk, const Box& prev, int o_count,
                    const PipelineConfig& cfg);

/// Centre moves by `v`; size blends toward the union of `o_boxes` (unchanged
/// when empty); the result is clipped to the frame.
Box update_held(const Box& prev_held, Vec2 v, std::span<const Box> o_boxes, double beta,
                FrameDims frame);

/// exp(-distance(centre(anchor), predicted) / ref_diag).
double motion_prior(const Box& anchor, Point2 predicted_center, double ref_diag);

struct Recovery {
  Box box;
  RecoveryStage stage = RecoveryStage::None;
  double score = 0.0;
};

/// Inputs to the cascade that depend on the session's mode.
struct RecoveryContext {
  Box b_ref;
  Point2 predicted_center;
};

/// Time spent inside memory upkeep and recovery scoring.
struct DamTiming {
  double seconds = 0.0;
  long long frames = 0;
};

/// One tracking session: tracker, motion estimator, memory and mode state.
class TrackingSession {
 public:
  TrackingSession(PipelineConfig cfg, DetectorInterface& detector,
                  std::unique_ptr<VelocitySource> motion = nullptr,
                  std::unique_ptr<TrackerInterface> tracker = nullptr);

  /// Consumes frame 0 (any index is accepted) and emits its output.
  TrackOutput init(const Frame& frame, const Box& b0);
  /// Next frame; its index must follow the previous one.
  TrackOutput step(const Frame& frame);

  /// The cascade on its own; exposed so recovery can be exercised directly.
  std::optional<Recovery> recover(const Frame& frame, const DetectionSet& dets,
                                  const RecoveryContext& ctx);
  RecoveryContext recovery_context(Vec2 v) const;

  const PipelineState& state() const { return state_; }
  const DistractorAwareMemory& memory() const { return dam_; }
  DistractorAwareMemory& memory() { return dam_; }
  const PipelineConfig& config() const { return cfg_; }
  const DamTiming& dam_timing() const { return timing_; }
  bool initialized() const { return initialized_; }

 private:
  std::optional<Recovery> realign_fallback(const DetectionSet& dets, const Box& prev) const;
  void refresh_verified(const Frame& frame, const Box& box, const Descriptor& desc);

  PipelineConfig cfg_;
  DetectorInterface& detector_;
  std::unique_ptr<VelocitySource> motion_;
  std::unique_ptr<TrackerInterface> tracker_;
  DistractorAwareMemory dam_;
  PipelineState state_;
  Frame prev_frame_;
  bool initialized_ = false;
  bool velocity_seeded_ = false;
  DamTiming timing_;
};

}  // namespace edgedam
