#include "edgedam/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace edgedam {

namespace {

class ScopedTimer {
 public:
  explicit ScopedTimer(double& sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

std::optional<Descriptor> try_descriptor(const Frame& frame, const Box& box) {
  try {
    return compute_descriptor(frame, box);
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
}

}  // namespace

const char* mode_name(Mode m) { return m == Mode::Holding ? "HOLDING" : "NORMAL"; }

std::vector<Box> detect_occlusion_set(const DetectionSet& dets, const Box& prev, double tau_occ) {
  std::vector<Box> out;
  for (const Detection& d : dets.detections) {
    if (iou(d.box, prev) >= tau_occ) out.push_back(d.box);
  }
  return out;
}

bool compute_switch(double conf, const Box& b_trk, const Box& prev, int o_count,
                    const PipelineConfig& cfg) {
  return conf < cfg.tau_conf || norm_displacement(b_trk, prev) > cfg.tau_jump || o_count >= 2;
}

Box update_held(const Box& prev_held, Vec2 v, std::span<const Box> o_boxes, double beta,
                FrameDims frame) {
  double tw = prev_held.w();
  double th = prev_held.h();
  if (!o_boxes.empty()) {
    const Box u = union_bbox(o_boxes);
    tw = u.w();
    th = u.h();
  }
  const double w = (1.0 - beta) * prev_held.w() + beta * tw;
  const double h = (1.0 - beta) * prev_held.h() + beta * th;
  return clamp_to_frame(Box::from_center(prev_held.center() + v, w, h), frame);
}

double motion_prior(const Box& anchor, Point2 predicted_center, double ref_diag) {
  if (!(ref_diag > 0.0)) throw std::invalid_argument("motion prior needs a positive diagonal");
  return std::exp(-distance(anchor.center(), predicted_center) / ref_diag);
}

TrackingSession::TrackingSession(PipelineConfig cfg, DetectorInterface& detector,
                                 std::unique_ptr<VelocitySource> motion,
                                 std::unique_ptr<TrackerInterface> tracker)
    : cfg_((cfg.validate(), cfg)),
      detector_(detector),
      motion_(motion ? std::move(motion) : std::make_unique<MotionEstimator>()),
      tracker_(tracker ? std::move(tracker) : std::make_unique<TemplateTracker>(cfg.search_factor)),
      dam_(cfg.dam, true) {}

void TrackingSession::refresh_verified(const Frame& frame, const Box& box, const Descriptor& desc) {
  state_.last_verified_descriptor = desc;
  state_.last_verified_template = make_template(frame.image, box);
  state_.last_verified_box = box;
}

TrackOutput TrackingSession::init(const Frame& frame, const Box& b0) {
  if (!inside_frame(b0, frame.dims())) throw std::invalid_argument("initial box lies outside the frame");
  tracker_->init(frame, b0);
  state_ = PipelineState{};
  state_.t = frame.index;
  state_.estimate = b0;
  state_.last_detections = DetectionSet{frame.index, {}};
  const Descriptor desc = compute_descriptor(frame, b0);
  {
    ScopedTimer timer(timing_.seconds);
    dam_.ram_insert(b0, desc, frame.index);
  }
  refresh_verified(frame, b0, desc);
  prev_frame_ = frame;
  initialized_ = true;
  return {frame.index, b0, Mode::Normal, 1.0, 0, false, RecoveryStage::None};
}

RecoveryContext TrackingSession::recovery_context(Vec2 v) const {
  if (state_.mode == Mode::Holding && state_.held) {
    return {*state_.held, state_.held->center()};
  }
  return {state_.estimate, state_.estimate.center() + v};
}

std::optional<Recovery> TrackingSession::realign_fallback(const DetectionSet& dets,
                                                          const Box& prev) const {
  std::optional<Recovery> best;
  for (const Detection& d : dets.detections) {
    const double o = iou(d.box, prev);
    if (o > 0.0 && (!best || o > best->score)) best = Recovery{d.box, RecoveryStage::SnapBack, o};
  }
  return best;
}

std::optional<Recovery> TrackingSession::recover(const Frame& frame, const DetectionSet& dets,
                                                 const RecoveryContext& ctx) {
  const Features& f = cfg_.features;
  const FrameDims dims = frame.dims();
  const double ref_diag = ctx.b_ref.diagonal();

  if (f.use_drm && !dam_.drm().empty()) {
    if (const auto phi_ref = try_descriptor(frame, ctx.b_ref)) {
      std::vector<double> priors;
      priors.reserve(dam_.drm().size());
      std::optional<AnchorMatch> match;
      {
        ScopedTimer timer(timing_.seconds);
        for (const DrmEntry& e : dam_.drm()) {
          priors.push_back(motion_prior(e.box, ctx.predicted_center, ref_diag));
        }
        match = dam_.best_anchor(ctx.b_ref, *phi_ref, priors, frame.index);
      }
      if (match && cosine(match->entry.descriptor, *phi_ref) >= cfg_.tau_app) {
        const Box& d = match->entry.box;
        const Box box = cfg_.stage1_reinit == AnchorPlacement::Anchor
                            ? d
                            : clamp_to_frame(Box::from_center(ctx.predicted_center, d.w(), d.h()), dims);
        return Recovery{box, RecoveryStage::Anchor, match->score};
      }
    }
  }

  if (f.use_ram && !state_.last_verified_descriptor.empty()) {
    std::optional<Recovery> best;
    for (const Detection& det : dets.detections) {
      const auto desc = try_descriptor(frame, det.box);
      if (!desc) continue;
      ScopedTimer timer(timing_.seconds);
      const double app = cosine(*desc, state_.last_verified_descriptor);
      if (app < cfg_.tau_app) continue;
      const double s = cfg_.snap_w_app * app +
                       cfg_.snap_w_mot * motion_prior(det.box, ctx.predicted_center, ref_diag) -
                       cfg_.dam.gamma * max_negative_similarity(*desc, dam_.negatives());
      if (!best || s > best->score) best = Recovery{det.box, RecoveryStage::SnapBack, s};
    }
    if (best && best->score >= cfg_.tau_snap) return best;
  }

  if (f.use_drm) {
    const Box region = roi_crop(ctx.b_ref, cfg_.ncc_region_factor, dims);
    const Box& lv = state_.last_verified_box;
    const Point2 prefer{ctx.predicted_center.x - lv.w() / 2.0, ctx.predicted_center.y - lv.h() / 2.0};
    const auto match =
        scaled_template_search(frame.image, state_.last_verified_template, lv.w(), lv.h(), region, prefer);
    if (match && match->score >= cfg_.tau_ncc) {
      const Box box = clamp_to_frame(match->box, dims);
      const auto desc = try_descriptor(frame, box);
      if (desc && cosine(*desc, state_.last_verified_descriptor) >= cfg_.tau_app) {
        return Recovery{box, RecoveryStage::Template, match->score};
      }
    }
  }
  return std::nullopt;
}

TrackOutput TrackingSession::step(const Frame& frame) {
  if (!initialized_) throw std::logic_error("step before init");
  if (frame.index != state_.t + 1) {
    throw std::invalid_argument("frame " + std::to_string(frame.index) + " does not follow frame " +
                                std::to_string(state_.t));
  }
  if (frame.dims() != prev_frame_.dims()) throw std::invalid_argument("frame size changed mid-sequence");

  const Features& f = cfg_.features;
  const std::int64_t t = frame.index;
  const Box prev = state_.estimate;
  const bool was_holding = state_.mode == Mode::Holding;

  const Schedule sched = schedule(t, cfg_.sources.stride_delta, state_.occ_flag || state_.lost);
  DetectionSet dets{t, {}};
  if (f.use_detector) {
    dets = provide(detector_, frame, prev, sched, state_.last_detections, cfg_.sources);
    state_.last_detections = dets;
  }

  const TrackResult trk = tracker_->update(frame);
  const Vec2 v_now = motion_->estimate(prev_frame_, frame, prev);
  // Flow measured across a switch frame or over an occluder describes the
  // occluder; propagation uses the smoothed velocity of the stable frames.
  const Vec2 v = state_.velocity;

  const std::vector<Box> occ =
      f.use_detector ? detect_occlusion_set(dets, prev, cfg_.tau_occ) : std::vector<Box>{};
  const int o_count = static_cast<int>(occ.size());
  const bool sw = f.use_detector && compute_switch(trk.confidence, trk.box, prev, o_count, cfg_);

  TrackOutput out{t, trk.box, Mode::Normal, trk.confidence, o_count, sw, RecoveryStage::None};
  prev_frame_ = frame;
  state_.t = t;
  ++timing_.frames;

  auto settle_normal = [&](const Box& box) {
    state_.mode = Mode::Normal;
    state_.estimate = box;
    state_.held.reset();
    state_.occ_flag = false;
    state_.lost = false;
    out.box = box;
    out.mode = Mode::Normal;
  };

  if (!sw) {
    Box candidate = trk.box;
    if (f.use_detector && sched.run_detection && !dets.empty()) {
      const Detection* best = nullptr;
      double best_iou = -1.0;
      for (const Detection& d : dets.detections) {
        const double o = iou(d.box, trk.box);
        if (o > best_iou) {
          best_iou = o;
          best = &d;
        }
      }
      if (best_iou >= cfg_.tau_match) {
        tracker_->reinit(frame, best->box);
        candidate = best->box;
      }
    }
    if (f.use_ram) {
      if (const auto desc = try_descriptor(frame, candidate)) {
        bool admitted = false;
        {
          ScopedTimer timer(timing_.seconds);
          admitted = dam_.ram_admit(candidate, *desc, prev, t);
          if (admitted && f.use_drm) dam_.try_promote(t);
        }
        if (admitted) refresh_verified(frame, candidate, *desc);
      }
    }
    state_.velocity = velocity_seeded_ ? 0.5 * v_now + 0.5 * state_.velocity : v_now;
    velocity_seeded_ = true;
    settle_normal(candidate);
    return out;
  }

  if (f.use_held) {
    const Box base = was_holding && state_.held ? *state_.held : prev;
    state_.held = update_held(base, v, occ, cfg_.beta, frame.dims());
  }

  std::optional<Recovery> rec;
  if (f.use_ram) {
    rec = recover(frame, dets, recovery_context(v));
  } else {
    rec = realign_fallback(dets, prev);
  }

  std::vector<Descriptor> negatives;
  if (f.use_drm) {
    for (const Box& b : occ) {
      if (rec && iou(b, rec->box) >= 0.5) continue;
      if (auto d = try_descriptor(frame, b)) negatives.push_back(std::move(*d));
    }
    ScopedTimer timer(timing_.seconds);
    for (Descriptor& d : negatives) dam_.add_negative(std::move(d));
  }

  if (rec) {
    tracker_->reinit(frame, rec->box);
    if (f.use_ram) {
      if (const auto desc = try_descriptor(frame, rec->box)) {
        bool admitted = false;
        {
          ScopedTimer timer(timing_.seconds);
          admitted = dam_.ram_admit_bypass(rec->box, *desc, t);
        }
        if (admitted) refresh_verified(frame, rec->box, *desc);
      }
    }
    settle_normal(rec->box);
    out.stage = rec->stage;
    return out;
  }

  if (f.use_held) {
    state_.mode = Mode::Holding;
    state_.occ_flag = true;
    state_.estimate = *state_.held;
    out.box = *state_.held;
    out.mode = Mode::Holding;
    out.stage = RecoveryStage::Held;
  } else {
    state_.estimate = trk.box;
    state_.lost = true;
  }
  return out;
}

}  // namespace edgedam
