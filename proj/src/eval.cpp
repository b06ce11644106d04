#include "edgedam/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace edgedam {

namespace {

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

std::vector<std::optional<double>> iou_trace(const std::vector<Box>& pred,
                                             const std::vector<std::optional<Box>>& gt) {
  if (pred.size() != gt.size()) {
    throw std::invalid_argument("prediction has " + std::to_string(pred.size()) +
                                " frames, ground truth has " + std::to_string(gt.size()));
  }
  std::vector<std::optional<double>> out(pred.size());
  for (std::size_t t = 0; t < pred.size(); ++t) {
    if (gt[t]) out[t] = iou(pred[t], *gt[t]);
  }
  return out;
}

double mean_iou(const std::vector<std::optional<double>>& iou) {
  double sum = 0.0;
  long long n = 0;
  for (const auto& v : iou) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("no scored frames");
  return sum / static_cast<double>(n);
}

double robustness(const std::vector<std::optional<double>>& iou, double tau_rob) {
  long long n = 0;
  long long ok = 0;
  for (const auto& v : iou) {
    if (!v) continue;
    ++n;
    if (*v > tau_rob) ++ok;
  }
  if (n == 0) throw std::invalid_argument("no scored frames");
  return static_cast<double>(ok) / static_cast<double>(n);
}

std::vector<RecoveryEvent> recovery_events(const std::vector<std::optional<double>>& iou,
                                           const std::vector<OcclusionEvent>& events, int l_max,
                                           double tau) {
  std::vector<RecoveryEvent> out;
  for (const OcclusionEvent& e : events) {
    RecoveryEvent r{e.end, false, 0};
    for (int k = 0; k <= l_max; ++k) {
      const std::int64_t t = e.end + k;
      if (t >= static_cast<std::int64_t>(iou.size())) break;
      const auto& v = iou[static_cast<std::size_t>(t)];
      if (v && *v >= tau) {
        r.recovered = true;
        r.latency = k;
        break;
      }
    }
    out.push_back(r);
  }
  return out;
}

RecoveryStats recovery_stats(const std::vector<RecoveryEvent>& events) {
  if (events.empty()) throw std::invalid_argument("no occlusion events");
  RecoveryStats s;
  s.events = static_cast<int>(events.size());
  std::vector<double> lat;
  for (const RecoveryEvent& e : events) {
    if (!e.recovered) continue;
    ++s.recovered;
    lat.push_back(e.latency);
  }
  s.rate = static_cast<double>(s.recovered) / s.events;
  if (!lat.empty()) {
    s.mean_latency = std::accumulate(lat.begin(), lat.end(), 0.0) / static_cast<double>(lat.size());
    s.median_latency = percentile(lat, 0.5);
  }
  return s;
}

Throughput throughput(const std::vector<double>& frame_seconds) {
  Throughput tp;
  tp.frames = static_cast<long long>(frame_seconds.size());
  tp.total_seconds = std::accumulate(frame_seconds.begin(), frame_seconds.end(), 0.0);
  if (tp.total_seconds > 0.0) tp.fps = static_cast<double>(tp.frames) / tp.total_seconds;
  tp.p50_ms = 1e3 * percentile(frame_seconds, 0.5);
  tp.p95_ms = 1e3 * percentile(frame_seconds, 0.95);
  return tp;
}

SequenceResult evaluate(const std::vector<TrackOutput>& outputs,
                        const std::vector<std::optional<Box>>& gt,
                        const std::vector<OcclusionEvent>& events,
                        std::vector<double> frame_seconds) {
  std::vector<Box> pred;
  SequenceResult r;
  for (const TrackOutput& o : outputs) {
    pred.push_back(o.box);
    r.modes.push_back(o.mode);
  }
  r.iou = iou_trace(pred, gt);
  r.recoveries = recovery_events(r.iou, events);
  r.frame_seconds = std::move(frame_seconds);
  return r;
}

}  // namespace edgedam
