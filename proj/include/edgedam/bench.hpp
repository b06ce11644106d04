#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edgedam/config.hpp"
#include "edgedam/eval.hpp"
#include "edgedam/formats.hpp"
#include "edgedam/pipeline.hpp"

namespace edgedam {

/// One benchmark sequence with everything needed to track and score it.
struct CaseData {
  std::string id;
  std::unique_ptr<FrameSource> frames;
  DetectionScript detections;
  GroundTruth gt;
  std::vector<OcclusionEvent> events;
};

/// Cases are materialised one at a time so a suite never sits in memory.
struct CaseRef {
  std::string id;
  std::function<CaseData()> load;
};

/// Subdirectories of `dir` that hold frames/, detections.jsonl, gt.jsonl and
/// events.json, sorted by name.
std::vector<CaseRef> suite_from_directory(const std::filesystem::path& dir);
/// The standard suite rendered in memory.
std::vector<CaseRef> suite_in_memory(const std::vector<ScenarioSpec>& specs);

struct CaseResult {
  std::string id;
  std::vector<TrackOutput> outputs;
  SequenceResult result;
  double dam_seconds = 0.0;
};

/// Tracks a case from its first ground-truth box.
CaseResult run_case(const CaseData& data, const PipelineConfig& cfg);

struct SuiteRow {
  std::string label;
  double mean_iou = 0.0;  // pooled over every scored frame of the suite
  double robustness = 0.0;
  RecoveryStats recovery;
  long long frames = 0;
  // Timing; never part of the deterministic metrics.
  Throughput throughput;
  double dam_us_per_frame = 0.0;
  std::vector<std::string> case_ids;
  std::vector<double> case_iou;
};

/// Runs every case; `repeats` > 1 keeps the smallest DAM time per case.
SuiteRow run_suite(const std::vector<CaseRef>& cases, const PipelineConfig& cfg,
                   const std::string& label, int repeats = 1);

/// Several configurations over the same cases. Repeats cycle through the
/// configurations case by case so slow drift in machine speed spreads evenly.
std::vector<SuiteRow> run_suite_interleaved(const std::vector<CaseRef>& cases,
                                            const std::vector<PipelineConfig>& cfgs,
                                            const std::vector<std::string>& labels, int repeats);

/// Perturbed copies with every perturbable setting scaled by (1 + factor).
PipelineConfig scaled_config(const PipelineConfig& base, double factor);

struct PerturbationResult {
  double p = 0.0;
  SuiteRow plus;
  SuiteRow minus;
  double fluctuation = 0.0;  // max |mean IoU - base mean IoU|
};

struct BenchOptions {
  std::vector<int> capacities;
  bool components = false;
  std::optional<double> perturb;
  int timing_repeats = 3;
};

struct BenchReport {
  std::vector<SuiteRow> rows;
  std::vector<SuiteRow> capacity_rows;
  std::vector<SuiteRow> component_rows;
  std::optional<PerturbationResult> perturbation;
  PipelineConfig config;
  std::size_t cases = 0;
};

BenchReport run_bench(const std::vector<CaseRef>& cases, const PipelineConfig& cfg,
                      const BenchOptions& opts);

Json report_to_json(const BenchReport& report);
/// Copy of a report with every "timing" member removed.
Json strip_timing(const Json& report);
std::string report_table(const BenchReport& report);

}  // namespace edgedam
