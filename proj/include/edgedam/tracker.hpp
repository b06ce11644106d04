#pragma once

#include <optional>

#include "edgedam/appearance.hpp"
#include "edgedam/geometry.hpp"
#include "edgedam/media.hpp"

namespace edgedam {

struct TrackResult {
  Box box;
  double confidence = 0.0;  // [0, 1]
};

class TrackerInterface {
 public:
  virtual ~TrackerInterface() = default;
  virtual void init(const Frame& frame, const Box& box) = 0;
  /// Throws std::logic_error before init.
  virtual TrackResult update(const Frame& frame) = 0;
  virtual void reinit(const Frame& frame, const Box& box) { init(frame, box); }
  virtual bool initialized() const = 0;
};

inline constexpr int kTemplateSide = 32;

/// Fixed-template NCC propagator. The template is the init box resampled to
/// 32x32 and is never adapted between (re)inits. Each update searches a window
/// of `search_factor` times the box size centred on the last box.
class TemplateTracker : public TrackerInterface {
 public:
  explicit TemplateTracker(double search_factor = 1.5);

  void init(const Frame& frame, const Box& box) override;
  TrackResult update(const Frame& frame) override;
  bool initialized() const override { return box_.has_value(); }

  const GrayPatch& templ() const { return templ_; }
  std::optional<Box> last_box() const { return box_; }

 private:
  double search_factor_;
  GrayPatch templ_;
  std::optional<Box> box_;
};

/// 32x32 luma template of the region under `box`.
GrayPatch make_template(const RgbImage& image, const Box& box);

/// NCC search for a template that stands for a `box_w` x `box_h` box. The
/// in-frame part of `region` is sampled on a grid of pitch box_w / 32 by
/// box_h / 32, starting at the region corner. Equal peaks go to the placement
/// whose top-left is nearest `prefer`.
/// Empty when the region cannot hold the template.
std::optional<NccMatch> scaled_template_search(const RgbImage& image, const GrayPatch& templ,
                                               double box_w, double box_h, const Box& region,
                                               Point2 prefer);

}  // namespace edgedam
