#include "edgedam/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace edgedam {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Json row_to_json(const SuiteRow& row) {
  Json per_case = Json::array();
  for (std::size_t k = 0; k < row.case_iou.size(); ++k) {
    per_case.push_back({{"id", row.case_ids[k]}, {"mean_iou", row.case_iou[k]}});
  }
  return {{"label", row.label},
          {"metrics",
           {{"mean_iou", row.mean_iou},
            {"robustness", row.robustness},
            {"recovery_rate", row.recovery.rate},
            {"recovery_events", row.recovery.events},
            {"recovered", row.recovery.recovered},
            {"recf_mean", row.recovery.mean_latency},
            {"recf_median", row.recovery.median_latency},
            {"frames", row.frames},
            {"cases", per_case}}},
          {"timing",
           {{"fps", row.throughput.fps},
            {"p50_ms", row.throughput.p50_ms},
            {"p95_ms", row.throughput.p95_ms},
            {"dam_us_per_frame", row.dam_us_per_frame}}}};
}

void strip(Json& j) {
  if (j.is_object()) {
    j.erase("timing");
    for (auto& [k, v] : j.items()) strip(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip(v);
  }
}

}  // namespace

std::vector<CaseRef> suite_from_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw std::runtime_error(dir.string() + ": not a directory");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "gt.jsonl")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw std::runtime_error(dir.string() + ": no scenarios found");

  std::vector<CaseRef> cases;
  for (const fs::path& p : dirs) {
    const std::string id = p.filename().string();
    cases.push_back({id, [p, id]() {
                       CaseData d;
                       d.id = id;
                       d.frames = std::make_unique<SequenceReader>(p / "frames");
                       d.detections = read_detections(p / "detections.jsonl");
                       d.gt = read_ground_truth(p / "gt.jsonl");
                       d.events = read_events(p / "events.json");
                       if (d.gt.size() != d.frames->size()) {
                         throw std::runtime_error(p.string() + ": " + std::to_string(d.frames->size()) +
                                                  " frames but " + std::to_string(d.gt.size()) +
                                                  " ground-truth records");
                       }
                       return d;
                     }});
  }
  return cases;
}

std::vector<CaseRef> suite_in_memory(const std::vector<ScenarioSpec>& specs) {
  std::vector<CaseRef> cases;
  for (const ScenarioSpec& spec : specs) {
    cases.push_back({spec.name, [spec]() {
                       auto scenario = std::make_unique<Scenario>(spec);
                       CaseData d;
                       d.id = spec.name;
                       d.detections = scenario->detections();
                       d.gt = scenario->ground_truth();
                       d.events = scenario->events();
                       d.frames = std::move(scenario);
                       return d;
                     }});
  }
  std::sort(cases.begin(), cases.end(), [](const CaseRef& a, const CaseRef& b) { return a.id < b.id; });
  return cases;
}

CaseResult run_case(const CaseData& data, const PipelineConfig& cfg) {
  if (data.gt.empty() || !data.gt.front()) {
    throw std::runtime_error(data.id + ": frame 0 needs a ground-truth box to initialise from");
  }
  ScriptedDetector detector(data.detections);
  TrackingSession session(cfg, detector);
  CaseResult r;
  r.id = data.id;
  std::vector<double> secs;
  secs.reserve(data.frames->size());
  for (std::size_t t = 0; t < data.frames->size(); ++t) {
    const Frame frame = data.frames->frame(t);
    const auto start = Clock::now();
    r.outputs.push_back(t == 0 ? session.init(frame, *data.gt.front()) : session.step(frame));
    secs.push_back(seconds_since(start));
  }
  r.result = evaluate(r.outputs, data.gt, data.events, std::move(secs));
  r.dam_seconds = session.dam_timing().seconds;
  return r;
}

namespace {

SuiteRow aggregate(const std::string& label, const std::vector<CaseResult>& results,
                   const std::vector<double>& dam_seconds) {
  SuiteRow row;
  row.label = label;
  std::vector<std::optional<double>> pooled;
  std::vector<RecoveryEvent> events;
  std::vector<double> secs;
  double dam_total = 0.0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const SequenceResult& s = results[k].result;
    pooled.insert(pooled.end(), s.iou.begin(), s.iou.end());
    events.insert(events.end(), s.recoveries.begin(), s.recoveries.end());
    secs.insert(secs.end(), s.frame_seconds.begin(), s.frame_seconds.end());
    row.case_ids.push_back(results[k].id);
    row.case_iou.push_back(mean_iou(s.iou));
    dam_total += dam_seconds[k];
  }
  row.mean_iou = mean_iou(pooled);
  row.robustness = robustness(pooled);
  row.recovery = events.empty() ? RecoveryStats{} : recovery_stats(events);
  row.frames = static_cast<long long>(pooled.size());
  row.throughput = throughput(secs);
  row.dam_us_per_frame = row.frames > 0 ? 1e6 * dam_total / static_cast<double>(row.frames) : 0.0;
  return row;
}

CaseResult run_named(const CaseData& data, const PipelineConfig& cfg) {
  try {
    return run_case(data, cfg);
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario " + data.id + ": " + e.what());
  }
}

}  // namespace

std::vector<SuiteRow> run_suite_interleaved(const std::vector<CaseRef>& cases,
                                            const std::vector<PipelineConfig>& cfgs,
                                            const std::vector<std::string>& labels, int repeats) {
  const std::size_t n = cfgs.size();
  std::vector<std::vector<CaseResult>> results(n);
  std::vector<std::vector<double>> dam(n);
  for (const CaseRef& ref : cases) {
    const CaseData data = ref.load();
    for (int r = 0; r < std::max(1, repeats); ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        CaseResult res = run_named(data, cfgs[c]);
        if (r == 0) {
          dam[c].push_back(res.dam_seconds);
          results[c].push_back(std::move(res));
        } else {
          dam[c].back() = std::min(dam[c].back(), res.dam_seconds);
        }
      }
    }
  }
  std::vector<SuiteRow> rows;
  for (std::size_t c = 0; c < n; ++c) rows.push_back(aggregate(labels[c], results[c], dam[c]));
  return rows;
}

SuiteRow run_suite(const std::vector<CaseRef>& cases, const PipelineConfig& cfg,
                   const std::string& label, int repeats) {
  return run_suite_interleaved(cases, {cfg}, {label}, repeats).front();
}

PipelineConfig scaled_config(const PipelineConfig& base, double factor) {
  PipelineConfig cfg = base;
  for (const std::string& key : perturbable_keys()) {
    set_real_clamped(cfg, key, get_real(base, key) * (1.0 + factor));
  }
  cfg.validate();
  return cfg;
}

BenchReport run_bench(const std::vector<CaseRef>& cases, const PipelineConfig& cfg,
                      const BenchOptions& opts) {
  BenchReport rep;
  rep.config = cfg;
  rep.cases = cases.size();
  rep.rows.push_back(run_suite(cases, cfg, "default"));

  if (!opts.capacities.empty()) {
    std::vector<PipelineConfig> cfgs;
    std::vector<std::string> labels;
    for (int c : opts.capacities) {
      PipelineConfig k = cfg;
      k.dam.ram_capacity = c;
      k.dam.drm_capacity = c;
      k.validate();
      cfgs.push_back(k);
      labels.push_back("ram_drm=" + std::to_string(c) + "-" + std::to_string(c));
    }
    rep.capacity_rows = run_suite_interleaved(cases, cfgs, labels, opts.timing_repeats);
  }

  if (opts.components) {
    const std::pair<const char*, Features> ladder[] = {{"tracker-only", tracker_only()},
                                                       {"+detector", with_detector()},
                                                       {"+RAM", with_ram()},
                                                       {"full", full_system()}};
    for (const auto& [name, features] : ladder) {
      PipelineConfig k = cfg;
      k.features = features;
      rep.component_rows.push_back(run_suite(cases, k, name));
    }
  }

  if (opts.perturb) {
    PerturbationResult pr;
    pr.p = *opts.perturb;
    char plus[32], minus[32];
    std::snprintf(plus, sizeof plus, "perturb+%.2f", pr.p);
    std::snprintf(minus, sizeof minus, "perturb-%.2f", pr.p);
    pr.plus = run_suite(cases, scaled_config(cfg, pr.p), plus);
    pr.minus = run_suite(cases, scaled_config(cfg, -pr.p), minus);
    const double base = rep.rows.front().mean_iou;
    pr.fluctuation = std::max(std::abs(pr.plus.mean_iou - base), std::abs(pr.minus.mean_iou - base));
    rep.perturbation = std::move(pr);
  }
  return rep;
}

Json report_to_json(const BenchReport& report) {
  Json doc;
  doc["suite_cases"] = report.cases;
  doc["config"] = Json::parse(config_to_json(report.config));
  auto rows = [&](const std::vector<SuiteRow>& rs) {
    Json arr = Json::array();
    for (const SuiteRow& r : rs) arr.push_back(row_to_json(r));
    return arr;
  };
  doc["rows"] = rows(report.rows);
  if (!report.capacity_rows.empty()) {
    Json cap;
    cap["rows"] = rows(report.capacity_rows);
    bool monotone = true;
    for (std::size_t k = 1; k < report.capacity_rows.size(); ++k) {
      monotone = monotone &&
                 report.capacity_rows[k].dam_us_per_frame >= report.capacity_rows[k - 1].dam_us_per_frame;
    }
    cap["timing"] = {{"dam_time_nondecreasing", monotone}};
    doc["capacity"] = cap;
  }
  if (!report.component_rows.empty()) doc["components"] = rows(report.component_rows);
  if (report.perturbation) {
    const PerturbationResult& p = *report.perturbation;
    doc["perturbation"] = {{"p", p.p},
                           {"base_mean_iou", report.rows.front().mean_iou},
                           {"plus", row_to_json(p.plus)},
                           {"minus", row_to_json(p.minus)},
                           {"fluctuation", p.fluctuation}};
  }
  doc["note"] =
      "robustness = fraction of frames with IoU > 0.1; recovery = IoU >= 0.5 within 30 frames of "
      "reappearance; simplified definitions, not the VOT protocol";
  return doc;
}

Json strip_timing(const Json& report) {
  Json copy = report;
  strip(copy);
  return copy;
}

std::string report_table(const BenchReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %8s %8s %8s %6s %6s %8s %10s\n", "config", "IoU", "Robust",
                "RecRate", "RecF", "RecMd", "FPS", "DAM us/f");
  out += line;
  auto add = [&](const SuiteRow& r) {
    std::snprintf(line, sizeof line, "%-22s %8.4f %8.4f %8.3f %6.2f %6.1f %8.1f %10.2f\n",
                  r.label.c_str(), r.mean_iou, r.robustness, r.recovery.rate, r.recovery.mean_latency,
                  r.recovery.median_latency, r.throughput.fps, r.dam_us_per_frame);
    out += line;
  };
  for (const auto& r : report.rows) add(r);
  for (const auto& r : report.component_rows) add(r);
  for (const auto& r : report.capacity_rows) add(r);
  if (report.perturbation) {
    add(report.perturbation->plus);
    add(report.perturbation->minus);
    std::snprintf(line, sizeof line, "IoU fluctuation at +/-%.2f: %.4f\n", report.perturbation->p,
                  report.perturbation->fluctuation);
    out += line;
  }
  return out;
}

}  // namespace edgedam
