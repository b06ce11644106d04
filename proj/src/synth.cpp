#include "edgedam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "edgedam/rng.hpp"

namespace edgedam {

namespace {

enum Stream : std::uint64_t {
  kBackground = 1,
  kTargetTexture = 2,
  kDistractorTexture = 16,
  kDetections = 1 << 20,
};

// Smoothly interpolated lattice noise in [-1, 1].
std::vector<double> value_noise(int w, int h, int cell, SplitMix64& rng) {
  const int gw = w / cell + 2;
  const int gh = h / cell + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
  for (double& v : lattice) v = rng.uniform(-1.0, 1.0);
  auto smooth = [](double f) { return f * f * (3.0 - 2.0 * f); };
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const int gy = y / cell;
    const double fy = smooth((y % cell + 0.5) / cell);
    for (int x = 0; x < w; ++x) {
      const int gx = x / cell;
      const double fx = smooth((x % cell + 0.5) / cell);
      const double a = lattice[gy * gw + gx];
      const double b = lattice[gy * gw + gx + 1];
      const double c = lattice[(gy + 1) * gw + gx];
      const double d = lattice[(gy + 1) * gw + gx + 1];
      out[static_cast<std::size_t>(y) * w + x] =
          (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
    }
  }
  return out;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Rgb lerp(Rgb a, Rgb b, double s) {
  return {to_byte(a.r + (b.r - a.r) * s), to_byte(a.g + (b.g - a.g) * s),
          to_byte(a.b + (b.b - a.b) * s)};
}

void paste(RgbImage& dst, const RgbImage& sprite, const Box& at) {
  const int x0 = static_cast<int>(at.x());
  const int y0 = static_cast<int>(at.y());
  for (int y = 0; y < sprite.height(); ++y) {
    const int fy = y0 + y;
    if (fy < 0 || fy >= dst.height()) continue;
    for (int x = 0; x < sprite.width(); ++x) {
      const int fx = x0 + x;
      if (fx < 0 || fx >= dst.width()) continue;
      dst.set(fx, fy, sprite.at(x, y));
    }
  }
}

void fill(RgbImage& dst, const Box& box, Rgb color) {
  const PixelRect r = covering_rect(box, dst.dims());
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) dst.set(x, y, color);
  }
}

Box jitter(const Box& b, const DetectionNoise& n, SplitMix64& rng, FrameDims dims) {
  const double cx = b.center().x + rng.normal() * n.center_sigma;
  const double cy = b.center().y + rng.normal() * n.center_sigma;
  const double w = std::max(4.0, b.w() + rng.normal() * n.size_sigma);
  const double h = std::max(4.0, b.h() + rng.normal() * n.size_sigma);
  return clamp_to_frame(Box::from_center({cx, cy}, w, h), dims);
}

Box occluder_box(const ScenarioSpec& spec, const OcclusionSpec& occ) {
  std::vector<Box> boxes;
  for (std::int64_t t = occ.start; t < occ.end(); ++t) boxes.push_back(object_box(spec.target, t));
  const Box u = union_bbox(boxes);
  const double m = occ.margin;
  return clamp_to_frame(Box(u.x() - m, u.y() - m, u.w() + 2 * m, u.h() + 2 * m), spec.dims);
}

void validate_object(const ObjectSpec& obj, const std::string& what, const ScenarioSpec& spec) {
  if (obj.path.empty()) throw std::invalid_argument(what + " has no waypoints");
  if (obj.width < 4 || obj.height < 4) throw std::invalid_argument(what + " is smaller than 4 px");
  if (obj.texture_amplitude < 0.0) throw std::invalid_argument(what + " has negative texture amplitude");
  for (std::size_t k = 1; k < obj.path.size(); ++k) {
    if (obj.path[k].frame <= obj.path[k - 1].frame) {
      throw std::invalid_argument(what + " waypoints are not in increasing frame order");
    }
  }
  for (std::int64_t t = 0; t < spec.length; ++t) {
    const Box b = object_box(obj, t);
    if (!inside_frame(b, spec.dims)) {
      throw std::invalid_argument(what + " leaves the frame at frame " + std::to_string(t));
    }
    if (t > 0) {
      const double step = distance(position_at(obj.path, t), position_at(obj.path, t - 1));
      if (step > kMaxSpeed + 1e-9) {
        std::ostringstream os;
        os << what << " moves " << step << " px at frame " << t << " (limit " << kMaxSpeed << ")";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

}  // namespace

Point2 position_at(const std::vector<Waypoint>& path, std::int64_t t) {
  if (path.empty()) throw std::invalid_argument("empty path");
  if (t <= path.front().frame) return path.front().center;
  if (t >= path.back().frame) return path.back().center;
  const auto next = std::upper_bound(path.begin(), path.end(), t,
                                     [](std::int64_t f, const Waypoint& w) { return f < w.frame; });
  const Waypoint& a = *(next - 1);
  const Waypoint& b = *next;
  const double s = static_cast<double>(t - a.frame) / static_cast<double>(b.frame - a.frame);
  return {a.center.x + (b.center.x - a.center.x) * s, a.center.y + (b.center.y - a.center.y) * s};
}

Box object_box(const ObjectSpec& obj, std::int64_t t) {
  const Point2 c = position_at(obj.path, t);
  return {std::round(c.x - obj.width / 2.0), std::round(c.y - obj.height / 2.0),
          static_cast<double>(obj.width), static_cast<double>(obj.height)};
}

void validate_spec(const ScenarioSpec& spec) {
  if (spec.length < 1) throw std::invalid_argument("scenario needs at least one frame");
  validate_object(spec.target, "target", spec);
  for (std::size_t k = 0; k < spec.distractors.size(); ++k) {
    const DistractorSpec& d = spec.distractors[k];
    if (d.similarity < 0.0 || d.similarity > 1.0) {
      throw std::invalid_argument("distractor " + std::to_string(k) + " similarity outside [0,1]");
    }
    validate_object(d.object, "distractor " + std::to_string(k), spec);
  }
  for (const OcclusionSpec& o : spec.occlusions) {
    if (o.start < 0 || o.duration < 1) throw std::invalid_argument("occlusion needs start >= 0 and duration >= 1");
    if (o.end() > spec.length) {
      throw std::invalid_argument("occlusion starting at frame " + std::to_string(o.start) +
                                  " runs past the last frame");
    }
    if (o.margin < 0) throw std::invalid_argument("occlusion margin must be >= 0");
  }
  const DetectionNoise& n = spec.noise;
  if (n.center_sigma < 0 || n.size_sigma < 0) throw std::invalid_argument("noise sigma must be >= 0");
  if (n.false_positive_rate < 0 || n.false_positive_rate > 1 || n.miss_rate < 0 || n.miss_rate > 1) {
    throw std::invalid_argument("noise rates must lie in [0,1]");
  }
  if (n.weak_frames_after_occlusion < 0) throw std::invalid_argument("weak frame count must be >= 0");
  if (spec.lighting.amplitude < 0 || spec.lighting.amplitude >= 0.5 || !(spec.lighting.period > 0)) {
    throw std::invalid_argument("lighting drift needs amplitude in [0, 0.5) and period > 0");
  }
}

Scenario::Scenario(ScenarioSpec spec) : spec_(std::move(spec)) {
  validate_spec(spec_);
  const int w = spec_.dims.width();
  const int h = spec_.dims.height();

  SplitMix64 bg_rng = derive_stream(spec_.seed, kBackground);
  const auto coarse = value_noise(w, h, 24, bg_rng);
  const auto fine = value_noise(w, h, 6, bg_rng);
  background_ = RgbImage(spec_.dims);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double n = 30.0 * coarse[i] + 10.0 * fine[i];
      background_.set(x, y, {to_byte(90 + n), to_byte(105 + n), to_byte(85 + n)});
    }
  }

  target_sprite_ = render_object(spec_.target, spec_.target.color, kTargetTexture);
  for (std::size_t k = 0; k < spec_.distractors.size(); ++k) {
    const DistractorSpec& d = spec_.distractors[k];
    distractor_sprites_.push_back(
        render_object(d.object, lerp(d.object.color, spec_.target.color, d.similarity), kDistractorTexture + k));
  }

  gt_.resize(static_cast<std::size_t>(spec_.length));
  for (std::int64_t t = 0; t < spec_.length; ++t) {
    if (!occluded(t)) gt_[static_cast<std::size_t>(t)] = object_box(spec_.target, t);
  }
  script_detections();
}

RgbImage Scenario::render_object(const ObjectSpec& obj, Rgb color, std::uint64_t stream) const {
  SplitMix64 rng = derive_stream(spec_.seed, stream);
  const auto n8 = value_noise(obj.width, obj.height, 8, rng);
  const auto n4 = value_noise(obj.width, obj.height, 4, rng);
  RgbImage sprite(FrameDims(obj.width, obj.height));
  for (int y = 0; y < obj.height; ++y) {
    for (int x = 0; x < obj.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * obj.width + x;
      double gain = 1.0 + obj.texture_amplitude * (0.6 * n8[i] + 0.4 * n4[i]);
      // A fixed dark band and a bright column give the texture a firm structure.
      if (y >= obj.height / 3 && y < obj.height / 3 + 3) gain *= 0.55;
      if (x >= obj.width / 2 && x < obj.width / 2 + 2) gain *= 1.35;
      sprite.set(x, y, {to_byte(color.r * gain), to_byte(color.g * gain), to_byte(color.b * gain)});
    }
  }
  return sprite;
}

bool Scenario::occluded(std::int64_t t) const {
  return std::any_of(spec_.occlusions.begin(), spec_.occlusions.end(),
                     [t](const OcclusionSpec& o) { return t >= o.start && t < o.end(); });
}

std::vector<OcclusionEvent> Scenario::events() const {
  std::vector<OcclusionEvent> out;
  for (const OcclusionSpec& o : spec_.occlusions) out.push_back({o.start, o.end()});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  return out;
}

Frame Scenario::frame(std::size_t t) const {
  if (t >= size()) throw std::out_of_range("frame index past end of scenario");
  const auto ti = static_cast<std::int64_t>(t);
  Frame f{background_, ti};
  for (std::size_t k = 0; k < spec_.distractors.size(); ++k) {
    paste(f.image, distractor_sprites_[k], object_box(spec_.distractors[k].object, ti));
  }
  paste(f.image, target_sprite_, object_box(spec_.target, ti));
  for (const OcclusionSpec& o : spec_.occlusions) {
    if (ti >= o.start && ti < o.end()) fill(f.image, occluder_box(spec_, o), o.color);
  }
  if (spec_.lighting.amplitude > 0.0) {
    std::uint8_t lut[3][256];
    for (int c = 0; c < 3; ++c) {
      const double gain = 1.0 + spec_.lighting.amplitude *
                                    std::sin(2.0 * std::numbers::pi * (static_cast<double>(ti) / spec_.lighting.period +
                                                                       c / 3.0));
      for (int v = 0; v < 256; ++v) lut[c][v] = to_byte(v * gain);
    }
    const int w = f.image.dims().width();
    const int h = f.image.dims().height();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Rgb p = f.image.at(x, y);
        f.image.set(x, y, {lut[0][p.r], lut[1][p.g], lut[2][p.b]});
      }
    }
  }
  return f;
}

void Scenario::script_detections() {
  const DetectionNoise& noise = spec_.noise;
  std::vector<Box> occluders;
  for (const OcclusionSpec& o : spec_.occlusions) occluders.push_back(occluder_box(spec_, o));

  for (std::int64_t t = 0; t < spec_.length; ++t) {
    SplitMix64 rng = derive_stream(spec_.seed, kDetections + static_cast<std::uint64_t>(t));
    std::vector<Detection> dets;
    const Box target = object_box(spec_.target, t);

    if (!occluded(t) && !rng.bernoulli(noise.miss_rate)) {
      const bool weak = std::any_of(spec_.occlusions.begin(), spec_.occlusions.end(),
                                    [&](const OcclusionSpec& o) {
                                      return t >= o.end() && t < o.end() + noise.weak_frames_after_occlusion;
                                    });
      const Box b = jitter(target, noise, rng, spec_.dims);
      const double score = weak ? rng.uniform(0.25, 0.44) : rng.uniform(0.55, 0.95);
      dets.push_back({b, score});
    }

    for (const DistractorSpec& d : spec_.distractors) {
      const Box db = object_box(d.object, t);
      double covered = occluded(t) ? 0.0 : intersection_area(db, target);
      for (std::size_t k = 0; k < occluders.size(); ++k) {
        const OcclusionSpec& o = spec_.occlusions[k];
        if (t >= o.start && t < o.end()) covered = std::max(covered, intersection_area(db, occluders[k]));
      }
      const Box b = jitter(db, noise, rng, spec_.dims);
      const double score = rng.uniform(0.55, 0.95);
      if (covered / area(db) > 0.5) continue;
      dets.push_back({b, score});
    }

    if (rng.bernoulli(noise.false_positive_rate)) {
      const double w = target.w() * rng.uniform(0.6, 1.4);
      const double h = target.h() * rng.uniform(0.6, 1.4);
      const double x = rng.uniform(0.0, spec_.dims.width() - w);
      const double y = rng.uniform(0.0, spec_.dims.height() - h);
      dets.push_back({Box(x, y, w, h), rng.uniform(0.2, 0.7)});
    }

    for (std::size_t i = dets.size(); i > 1; --i) std::swap(dets[i - 1], dets[rng.below(i)]);
    if (!dets.empty()) dets_[t] = std::move(dets);
  }
}

namespace {

struct PathPlanner {
  FrameDims dims;
  double half_w;
  double half_h;
  double margin;
  std::vector<Waypoint> path;
  std::int64_t frame = 0;
  Point2 cur;

  bool inside(Point2 p) const {
    return p.x >= half_w + margin && p.x <= dims.width() - half_w - margin &&
           p.y >= half_h + margin && p.y <= dims.height() - half_h - margin;
  }

  // Straight leg of `frames` frames; the heading closest to `pref_deg` that
  // stays inside the frame wins.
  void leg(std::int64_t frames, double speed, double pref_deg) {
    const double len = speed * static_cast<double>(frames);
    for (int k = 0; k < 48; ++k) {
      const int off = (k % 2 == 0 ? 1 : -1) * ((k + 1) / 2) * 15;
      const double a = (pref_deg + off) * std::numbers::pi / 180.0;
      const Point2 end{cur.x + len * std::cos(a), cur.y + len * std::sin(a)};
      if (inside(end)) {
        cur = end;
        frame += frames;
        path.push_back({frame, cur});
        return;
      }
    }
    throw std::logic_error("no feasible heading for scenario leg");
  }
};

std::vector<Waypoint> bounce_path(FrameDims dims, double half_w, double half_h, Point2 start,
                                  Vec2 v, std::int64_t length) {
  const double x_lo = half_w + 2, x_hi = dims.width() - half_w - 2;
  const double y_lo = half_h + 2, y_hi = dims.height() - half_h - 2;
  std::vector<Waypoint> path{{0, start}};
  Point2 p = start;
  for (std::int64_t t = 1; t < length; ++t) {
    const Point2 before = p;
    p = p + v;
    bool bounced = false;
    if (p.x < x_lo || p.x > x_hi) {
      p.x = p.x < x_lo ? 2 * x_lo - p.x : 2 * x_hi - p.x;
      v.dx = -v.dx;
      bounced = true;
    }
    if (p.y < y_lo || p.y > y_hi) {
      p.y = p.y < y_lo ? 2 * y_lo - p.y : 2 * y_hi - p.y;
      v.dy = -v.dy;
      bounced = true;
    }
    if (bounced) {
      if (path.back().frame != t - 1) path.push_back({t - 1, before});
      path.push_back({t, p});
    }
  }
  if (path.back().frame != length - 1) path.push_back({length - 1, p});
  return path;
}

}  // namespace

std::vector<ScenarioSpec> standard_suite() {
  const Rgb target_palette[] = {{200, 60, 50}, {50, 90, 200}, {220, 170, 40},
                                {170, 60, 190}, {40, 170, 190}, {230, 120, 40}};
  const Rgb distractor_palette[] = {{60, 60, 200}, {200, 200, 60}, {160, 40, 160},
                                    {40, 180, 120}, {210, 90, 40}, {90, 60, 210}};
  const double similarity[] = {0.3, 0.5, 0.7, 0.6};
  const double center_sigma[] = {1.0, 1.5, 2.0, 1.5};
  const double size_sigma[] = {1.0, 1.0, 1.5, 2.0};
  const double fp_rate[] = {0.05, 0.10, 0.15, 0.10};
  const double miss_rate[] = {0.02, 0.03, 0.05, 0.03};

  std::vector<ScenarioSpec> suite;
  for (int i = 0; i < 30; ++i) {
    const int n_distractors = 1 + i % 3;
    const int n_events = 1 + (i / 3) % 3;
    const int variant = i / 9;

    ScenarioSpec s;
    s.name = "s" + std::string(i < 10 ? "0" : "") + std::to_string(i) + "_d" +
             std::to_string(n_distractors) + "_o" + std::to_string(n_events) + "_v" +
             std::to_string(variant);
    s.seed = 0xED6EDA0000ull + 7919ull * static_cast<std::uint64_t>(i + 1);
    s.target.color = target_palette[i % 6];
    s.target.width = 36 + 4 * (i % 4);
    s.target.height = 36 + 4 * ((i / 2) % 4);

    const double speed = 2.5 + 0.5 * (i % 5);
    PathPlanner plan{s.dims, s.target.width / 2.0, s.target.height / 2.0, 24.0, {}, 0,
                     {320.0 + 8 * (i % 5) - 16, 240.0 + 6 * (i % 3) - 6}};
    plan.path.push_back({0, plan.cur});
    plan.leg(24, speed, (i * 47) % 360);
    for (int e = 0; e < n_events; ++e) {
      const int duration = 8 + (i + 2 * e) % 5;
      OcclusionSpec occ;
      occ.start = plan.frame + 9;
      occ.duration = duration;
      occ.color = {static_cast<std::uint8_t>(140 + 5 * (e % 3)), 135, 128};
      s.occlusions.push_back(occ);
      plan.leg(9 + duration + 36, speed, (i * 47 + (e + 1) * 113) % 360);
    }
    s.target.path = plan.path;
    s.length = plan.frame + 1;

    for (int k = 0; k < n_distractors; ++k) {
      DistractorSpec d;
      d.similarity = std::min(0.9, similarity[variant] + 0.1 * k);
      d.object.color = distractor_palette[(i + k) % 6];
      d.object.width = s.target.width + 4 * (k % 2) - 2;
      d.object.height = s.target.height - 4 * (k % 2) + 2;
      const double a = ((i * 71 + k * 131) % 360) * std::numbers::pi / 180.0;
      const double sp = 1.2 + 0.9 * k + 0.1 * (i % 3);
      const Point2 start{k % 2 == 0 ? 120.0 + 40 * k : 520.0 - 40 * k, k == 1 ? 380.0 - 10 * (i % 4) : 100.0 + 10 * (i % 4)};
      d.object.path = bounce_path(s.dims, d.object.width / 2.0, d.object.height / 2.0, start,
                                  {sp * std::cos(a), sp * std::sin(a)}, s.length);
      s.distractors.push_back(d);
    }

    s.noise.center_sigma = center_sigma[variant];
    s.noise.size_sigma = size_sigma[variant];
    s.noise.false_positive_rate = fp_rate[variant];
    s.noise.miss_rate = miss_rate[variant];
    s.noise.weak_frames_after_occlusion = 3;
    s.lighting = {0.08, 120.0};
    suite.push_back(std::move(s));
  }
  return suite;
}

}  // namespace edgedam
