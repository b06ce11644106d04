#pragma once

#include <optional>
#include <vector>

#include "edgedam/geometry.hpp"
#include "edgedam/media.hpp"

namespace edgedam {

/// Integer-pixel corners ordered by decreasing response (then y, then x).
std::vector<Point2> shi_tomasi_corners(const GrayPatch& gray, int max_n,
                                       double quality = 0.01, double min_distance = 3.0);

struct Flow {
  Vec2 v;
  bool valid = false;
  double residual = 0.0;  // mean absolute intensity error when valid
};

struct LkParams {
  int half_window = 5;  // 11x11
  int max_iterations = 5;
  double min_eigen = 1e-4;
  double max_residual = 0.1;
  double convergence = 0.01;
};

/// Single-level iterative Lucas-Kanade. Intensities are taken on a [0, 1]
/// scale. `guess` seeds every point's displacement.
std::vector<Flow> lk_flow(const GrayPatch& prev_gray, const GrayPatch& cur_gray,
                          const std::vector<Point2>& points, Vec2 guess = {},
                          const LkParams& params = {});

/// Short-term velocity between two consecutive frames.
class VelocitySource {
 public:
  virtual ~VelocitySource() = default;
  virtual Vec2 estimate(const Frame& prev, const Frame& cur, const Box& prev_box) = 0;
};

struct MotionConfig {
  int max_corners = 50;
  int min_valid = 4;
  double ema = 0.5;
  int margin = 12;
  LkParams lk;
};

/// Median LK flow of corners inside the previous box, falling back to an EMA
/// of box-centre displacement when too few flows survive.
class MotionEstimator : public VelocitySource {
 public:
  explicit MotionEstimator(MotionConfig cfg = {}) : cfg_(cfg) {}

  Vec2 estimate(const Frame& prev, const Frame& cur, const Box& prev_box) override;

  Vec2 ema_velocity() const { return ema_; }
  /// Valid flows behind the last estimate; 0 when it came from the fallback.
  int last_valid_count() const { return last_valid_; }

 private:
  MotionConfig cfg_;
  Vec2 ema_;
  Vec2 last_;
  std::optional<Box> prev_box_;
  int last_valid_ = 0;
};

/// Replays a fixed velocity; for experiments that isolate the held box.
class ConstantVelocity : public VelocitySource {
 public:
  explicit ConstantVelocity(Vec2 v) : v_(v) {}
  Vec2 estimate(const Frame&, const Frame&, const Box&) override { return v_; }

 private:
  Vec2 v_;
};

/// Component-wise median; the mean of the middle pair for even counts.
Vec2 median_flow(const std::vector<Vec2>& flows);

}  // namespace edgedam
