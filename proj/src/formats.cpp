#include "edgedam/formats.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace edgedam {

namespace {

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

template <typename Fn>
void for_each_line(const std::string& text, const std::string& name, Fn fn) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      fail(name, n, std::string("invalid JSON: ") + e.what());
    }
    try {
      fn(j, n);
    } catch (const Json::exception& e) {
      fail(name, n, e.what());
    } catch (const std::invalid_argument& e) {
      fail(name, n, e.what());
    }
  }
}

std::int64_t frame_index(const Json& j) {
  if (!j.contains("t") || !j["t"].is_number_integer() || j["t"].get<std::int64_t>() < 0) {
    throw std::invalid_argument("record needs a non-negative integer \"t\"");
  }
  return j["t"].get<std::int64_t>();
}

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw std::invalid_argument(std::string("missing numeric field \"") + key + "\"");
  }
  return j[key].get<double>();
}

Json rgb_to_json(Rgb c) { return Json::array({c.r, c.g, c.b}); }

Rgb rgb_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("colour must be [r, g, b]");
  auto channel = [](const Json& v) {
    const int x = v.get<int>();
    if (x < 0 || x > 255) throw std::invalid_argument("colour channel outside 0..255");
    return static_cast<std::uint8_t>(x);
  };
  return {channel(j[0]), channel(j[1]), channel(j[2])};
}

Json object_to_json(const ObjectSpec& o) {
  Json path = Json::array();
  for (const Waypoint& w : o.path) path.push_back({{"frame", w.frame}, {"x", w.center.x}, {"y", w.center.y}});
  return {{"color", rgb_to_json(o.color)},
          {"texture_amplitude", o.texture_amplitude},
          {"width", o.width},
          {"height", o.height},
          {"path", path}};
}

ObjectSpec object_from_json(const Json& j) {
  ObjectSpec o;
  o.color = rgb_from_json(j.at("color"));
  o.texture_amplitude = j.value("texture_amplitude", o.texture_amplitude);
  o.width = j.at("width").get<int>();
  o.height = j.at("height").get<int>();
  for (const Json& w : j.at("path")) {
    o.path.push_back({w.at("frame").get<std::int64_t>(), {w.at("x").get<double>(), w.at("y").get<double>()}});
  }
  return o;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Json box_to_json(const Box& b) { return {{"x", b.x()}, {"y", b.y()}, {"w", b.w()}, {"h", b.h()}}; }

Box box_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("box must be an object");
  return {number(j, "x"), number(j, "y"), number(j, "w"), number(j, "h")};
}

Box parse_box(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("box \"" + text + "\" must be x,y,w,h");
    }
    v.push_back(x);
  }
  if (v.size() != 4) throw std::invalid_argument("box \"" + text + "\" must be x,y,w,h");
  return {v[0], v[1], v[2], v[3]};
}

std::string detections_to_jsonl(const DetectionScript& script, std::int64_t length) {
  std::string out;
  for (std::int64_t t = 0; t < length; ++t) {
    Json dets = Json::array();
    if (const auto it = script.find(t); it != script.end()) {
      for (const Detection& d : it->second) {
        Json b = box_to_json(d.box);
        b["score"] = d.score;
        dets.push_back(b);
      }
    }
    out += Json{{"t", t}, {"detections", dets}}.dump() + "\n";
  }
  return out;
}

DetectionScript parse_detections(const std::string& text, const std::string& name) {
  DetectionScript script;
  for_each_line(text, name, [&](const Json& j, std::size_t line) {
    const std::int64_t t = frame_index(j);
    if (script.count(t)) fail(name, line, "duplicate frame " + std::to_string(t));
    if (!j.contains("detections") || !j["detections"].is_array()) {
      throw std::invalid_argument("record needs a \"detections\" array");
    }
    std::vector<Detection> dets;
    for (const Json& d : j["detections"]) {
      const double score = number(d, "score");
      if (score < 0.0 || score > 1.0) throw std::invalid_argument("score outside [0,1]");
      dets.push_back({box_from_json(d), score});
    }
    script[t] = std::move(dets);
  });
  return script;
}

DetectionScript read_detections(const std::filesystem::path& path) {
  return parse_detections(read_text(path), path.string());
}

std::string ground_truth_to_jsonl(const GroundTruth& gt) {
  std::string out;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    Json j{{"t", t}};
    if (gt[t]) {
      j["box"] = box_to_json(*gt[t]);
    } else {
      j["occluded"] = true;
    }
    out += j.dump() + "\n";
  }
  return out;
}

GroundTruth parse_ground_truth(const std::string& text, const std::string& name) {
  GroundTruth gt;
  for_each_line(text, name, [&](const Json& j, std::size_t line) {
    const std::int64_t t = frame_index(j);
    if (t != static_cast<std::int64_t>(gt.size())) {
      fail(name, line, "expected frame " + std::to_string(gt.size()) + ", found " + std::to_string(t));
    }
    if (j.value("occluded", false)) {
      gt.emplace_back(std::nullopt);
    } else {
      gt.emplace_back(box_from_json(j.at("box")));
    }
  });
  return gt;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(read_text(path), path.string());
}

std::string events_to_json(const std::vector<OcclusionEvent>& events) {
  Json arr = Json::array();
  for (const auto& e : events) arr.push_back({{"start", e.start}, {"end", e.end}});
  return Json{{"occlusions", arr}}.dump(2) + "\n";
}

std::vector<OcclusionEvent> read_events(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    const Json j = Json::parse(text);
    std::vector<OcclusionEvent> out;
    for (const Json& e : j.at("occlusions")) {
      out.push_back({e.at("start").get<std::int64_t>(), e.at("end").get<std::int64_t>()});
      if (out.back().end <= out.back().start) throw std::invalid_argument("event ends before it starts");
    }
    return out;
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

Json output_to_json(const TrackOutput& out) {
  Json j{{"t", out.t},
         {"box", box_to_json(out.box)},
         {"mode", mode_name(out.mode)},
         {"conf", out.confidence},
         {"o_count", out.o_count},
         {"switch", out.switched}};
  if (out.stage == RecoveryStage::Held) {
    j["recovery_stage"] = "held";
  } else {
    j["recovery_stage"] = static_cast<int>(out.stage);
  }
  return j;
}

std::string outputs_to_jsonl(const std::vector<TrackOutput>& outs) {
  std::string s;
  for (const TrackOutput& o : outs) s += output_to_json(o).dump() + "\n";
  return s;
}

std::vector<Box> read_predictions(const std::filesystem::path& path) {
  std::vector<Box> boxes;
  const std::string name = path.string();
  for_each_line(read_text(path), name, [&](const Json& j, std::size_t line) {
    const std::int64_t t = frame_index(j);
    if (t != static_cast<std::int64_t>(boxes.size())) {
      fail(name, line, "expected frame " + std::to_string(boxes.size()) + ", found " + std::to_string(t));
    }
    boxes.push_back(box_from_json(j.at("box")));
  });
  return boxes;
}

Json memory_dump(const DistractorAwareMemory& dam) {
  Json ram = Json::array();
  for (const RamEntry& e : dam.ram()) {
    ram.push_back({{"box", box_to_json(e.box)},
                   {"timestamp", e.timestamp},
                   {"checksum", e.descriptor.checksum()}});
  }
  Json drm = Json::array();
  for (const DrmEntry& e : dam.drm()) {
    drm.push_back({{"box", box_to_json(e.box)},
                   {"timestamp", e.promoted_at},
                   {"checksum", e.descriptor.checksum()}});
  }
  Json neg = Json::array();
  for (const Descriptor& d : dam.negatives()) neg.push_back({{"checksum", d.checksum()}});
  return {{"ram", ram}, {"drm", drm}, {"negative", neg}};
}

Json spec_to_json(const ScenarioSpec& spec) {
  Json distractors = Json::array();
  for (const DistractorSpec& d : spec.distractors) {
    distractors.push_back({{"similarity", d.similarity}, {"object", object_to_json(d.object)}});
  }
  Json occlusions = Json::array();
  for (const OcclusionSpec& o : spec.occlusions) {
    occlusions.push_back({{"start", o.start},
                          {"duration", o.duration},
                          {"color", rgb_to_json(o.color)},
                          {"margin", o.margin}});
  }
  const DetectionNoise& n = spec.noise;
  return {{"name", spec.name},
          {"width", spec.dims.width()},
          {"height", spec.dims.height()},
          {"length", spec.length},
          {"seed", spec.seed},
          {"target", object_to_json(spec.target)},
          {"distractors", distractors},
          {"occlusions", occlusions},
          {"noise",
           {{"center_sigma", n.center_sigma},
            {"size_sigma", n.size_sigma},
            {"false_positive_rate", n.false_positive_rate},
            {"miss_rate", n.miss_rate},
            {"weak_frames_after_occlusion", n.weak_frames_after_occlusion}}},
          {"lighting", {{"amplitude", spec.lighting.amplitude}, {"period", spec.lighting.period}}}};
}

ScenarioSpec spec_from_json(const Json& j) {
  ScenarioSpec s;
  s.name = j.value("name", std::string("scenario"));
  s.dims = FrameDims(j.value("width", 640), j.value("height", 480));
  s.length = j.at("length").get<std::int64_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.target = object_from_json(j.at("target"));
  for (const Json& d : j.value("distractors", Json::array())) {
    s.distractors.push_back({d.at("similarity").get<double>(), object_from_json(d.at("object"))});
  }
  for (const Json& o : j.value("occlusions", Json::array())) {
    OcclusionSpec occ;
    occ.start = o.at("start").get<std::int64_t>();
    occ.duration = o.at("duration").get<std::int64_t>();
    if (o.contains("color")) occ.color = rgb_from_json(o["color"]);
    occ.margin = o.value("margin", occ.margin);
    s.occlusions.push_back(occ);
  }
  if (j.contains("noise")) {
    const Json& n = j["noise"];
    s.noise.center_sigma = n.value("center_sigma", s.noise.center_sigma);
    s.noise.size_sigma = n.value("size_sigma", s.noise.size_sigma);
    s.noise.false_positive_rate = n.value("false_positive_rate", s.noise.false_positive_rate);
    s.noise.miss_rate = n.value("miss_rate", s.noise.miss_rate);
    s.noise.weak_frames_after_occlusion =
        n.value("weak_frames_after_occlusion", s.noise.weak_frames_after_occlusion);
  }
  if (j.contains("lighting")) {
    const Json& l = j["lighting"];
    s.lighting.amplitude = l.value("amplitude", s.lighting.amplitude);
    s.lighting.period = l.value("period", s.lighting.period);
  }
  return s;
}

ScenarioSpec read_spec(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return spec_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path frames = dir / "frames";
  fs::create_directories(frames);
  for (std::size_t t = 0; t < scenario.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.ppm", t);
    write_ppm(frames / name, scenario.frame(t).image);
  }
  write_text(dir / "detections.jsonl",
             detections_to_jsonl(scenario.detections(), static_cast<std::int64_t>(scenario.size())));
  write_text(dir / "gt.jsonl", ground_truth_to_jsonl(scenario.ground_truth()));
  write_text(dir / "events.json", events_to_json(scenario.events()));
  write_text(dir / "spec.json", spec_to_json(scenario.spec()).dump(2) + "\n");
}

}  // namespace edgedam
