#include "edgedam/sources.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace edgedam {

DetectionSet ScriptedDetector::detect(const Frame& frame, const std::optional<Box>& roi) {
  return static_cast<const ScriptedDetector&>(*this).detect(frame.index, roi);
}

DetectionSet ScriptedDetector::detect(std::int64_t t, const std::optional<Box>& roi) const {
  DetectionSet out{t, {}};
  const auto it = script_.find(t);
  if (it == script_.end()) return out;
  for (const Detection& d : it->second) {
    if (!roi || intersects(d.box, *roi)) out.detections.push_back(d);
  }
  return out;
}

void SourceConfig::validate() const {
  if (!(tau_s >= 0.0 && tau_s <= 1.0)) throw std::invalid_argument("invalid setting: tau_s");
  if (!(nms_iou >= 0.0 && nms_iou <= 1.0)) throw std::invalid_argument("invalid setting: nms_iou");
  if (stride_delta < 1) throw std::invalid_argument("invalid setting: delta");
  if (!(kappa >= 1.0)) throw std::invalid_argument("invalid setting: kappa");
}

DetectionSet filter_confident(const DetectionSet& dets, double tau_s) {
  DetectionSet out{dets.t, {}};
  std::copy_if(dets.detections.begin(), dets.detections.end(), std::back_inserter(out.detections),
               [tau_s](const Detection& d) { return d.score >= tau_s; });
  return out;
}

DetectionSet nms(const DetectionSet& dets, double iou_thresh) {
  const auto& in = dets.detections;
  std::vector<std::size_t> order(in.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return in[a].score > in[b].score; });

  DetectionSet out{dets.t, {}};
  for (std::size_t i : order) {
    const bool suppressed = std::any_of(out.detections.begin(), out.detections.end(),
                                        [&](const Detection& k) {
                                          return iou(k.box, in[i].box) >= iou_thresh;
                                        });
    if (!suppressed) out.detections.push_back(in[i]);
  }
  return out;
}

Schedule schedule(std::int64_t t, int delta, bool occ_prev) {
  if (t < 0 || delta < 1) throw std::invalid_argument("schedule needs t >= 0 and delta >= 1");
  return {t % delta == 0 || occ_prev, occ_prev};
}

DetectionSet provide(DetectorInterface& detector, const Frame& frame, const Box& prev_box,
                     Schedule sched, const DetectionSet& last_set, const SourceConfig& cfg) {
  if (!sched.run_detection) return last_set;
  std::optional<Box> roi;
  if (!sched.full_frame) roi = roi_crop(prev_box, cfg.kappa, frame.dims());
  DetectionSet raw = detector.detect(frame, roi);
  raw.t = frame.index;
  return nms(filter_confident(raw, cfg.tau_s), cfg.nms_iou);
}

}  // namespace edgedam
