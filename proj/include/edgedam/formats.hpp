#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgedam/dam.hpp"
#include "edgedam/pipeline.hpp"
#include "edgedam/sources.hpp"
#include "edgedam/synth.hpp"
#include "json.hpp"

namespace edgedam {

using Json = nlohmann::ordered_json;
using DetectionScript = std::map<std::int64_t, std::vector<Detection>>;
using GroundTruth = std::vector<std::optional<Box>>;

Json box_to_json(const Box& b);
/// Throws std::runtime_error on missing or non-numeric fields and invalid sizes.
Box box_from_json(const Json& j);
/// "x,y,w,h".
Box parse_box(const std::string& text);

std::string detections_to_jsonl(const DetectionScript& script, std::int64_t length);
DetectionScript parse_detections(const std::string& text, const std::string& name);
DetectionScript read_detections(const std::filesystem::path& path);

std::string ground_truth_to_jsonl(const GroundTruth& gt);
GroundTruth parse_ground_truth(const std::string& text, const std::string& name);
GroundTruth read_ground_truth(const std::filesystem::path& path);

std::string events_to_json(const std::vector<OcclusionEvent>& events);
std::vector<OcclusionEvent> read_events(const std::filesystem::path& path);

Json output_to_json(const TrackOutput& out);
std::string outputs_to_jsonl(const std::vector<TrackOutput>& outs);
/// Predicted boxes by frame order; `t` must run 0, 1, 2, ...
std::vector<Box> read_predictions(const std::filesystem::path& path);

/// RAM, DRM and negative bank with boxes, timestamps and descriptor checksums.
Json memory_dump(const DistractorAwareMemory& dam);

Json spec_to_json(const ScenarioSpec& spec);
ScenarioSpec spec_from_json(const Json& j);
ScenarioSpec read_spec(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace edgedam
