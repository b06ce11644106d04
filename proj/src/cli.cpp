#include "edgedam/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "edgedam/bench.hpp"
#include "edgedam/config.hpp"
#include "edgedam/eval.hpp"
#include "edgedam/formats.hpp"
#include "edgedam/media.hpp"
#include "edgedam/pipeline.hpp"
#include "edgedam/sources.hpp"
#include "edgedam/synth.hpp"

namespace edgedam {

namespace fs = std::filesystem;

namespace {

PipelineConfig config_or_defaults(const std::string& path, std::ostream& err) {
  if (!path.empty()) return load_config(path);
  PipelineConfig cfg;
  err << "no --config given; using defaults:\n" << config_to_json(cfg) << "\n";
  return cfg;
}

/// Files created by a command, deleted again if the command fails.
class OutputGuard {
 public:
  void add(fs::path p) { paths_.push_back(std::move(p)); }
  void commit() { paths_.clear(); }
  ~OutputGuard() {
    std::error_code ec;
    for (auto it = paths_.rbegin(); it != paths_.rend(); ++it) fs::remove(*it, ec);
  }

 private:
  std::vector<fs::path> paths_;
};

void ensure_directory(const fs::path& dir, OutputGuard& guard) {
  if (dir.empty() || fs::exists(dir)) return;
  ensure_directory(dir.parent_path(), guard);
  fs::create_directory(dir);
  guard.add(dir);
}

struct TrackArgs {
  std::string frames, init, detections, config, out, annotate;
};

void run_track(const TrackArgs& a, std::ostream& err) {
  const PipelineConfig cfg = config_or_defaults(a.config, err);
  const Box b0 = parse_box(a.init);
  SequenceReader frames(a.frames);
  ScriptedDetector detector(read_detections(a.detections));
  TrackingSession session(cfg, detector);

  OutputGuard guard;
  if (!a.annotate.empty()) ensure_directory(a.annotate, guard);
  std::vector<TrackOutput> outputs;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Frame frame = frames.frame(t);
    outputs.push_back(t == 0 ? session.init(frame, b0) : session.step(frame));
    if (!a.annotate.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "%06zu.ppm", t);
      const fs::path p = fs::path(a.annotate) / name;
      guard.add(p);
      const LabeledBox box{outputs.back().box, outputs.back().mode == Mode::Holding ? "held" : "pred"};
      write_annotated(frame, std::span<const LabeledBox>(&box, 1), p);
    }
  }
  const fs::path out(a.out);
  ensure_directory(out.parent_path(), guard);
  guard.add(out);
  write_text(out, outputs_to_jsonl(outputs));
  guard.commit();
}

void run_synth(const std::string& spec_path, bool suite, const std::string& out_dir) {
  OutputGuard guard;
  if (!spec_path.empty()) {
    const ScenarioSpec spec = read_spec(spec_path);
    validate_spec(spec);
    ensure_directory(out_dir, guard);
    write_scenario(Scenario(spec), out_dir);
  } else if (suite) {
    const auto specs = standard_suite();
    ensure_directory(out_dir, guard);
    for (const ScenarioSpec& spec : specs) {
      const fs::path dir = fs::path(out_dir) / spec.name;
      guard.add(dir);
      write_scenario(Scenario(spec), dir);
    }
  } else {
    throw std::invalid_argument("synth needs --spec FILE or --suite");
  }
  guard.commit();
}

std::vector<int> parse_capacities(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || v < 1) {
      throw std::invalid_argument("--ablate: bad capacity '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

struct BenchArgs {
  std::string suite, config, out;
  std::vector<std::string> ablate;
  std::optional<double> perturb;
  int repeats = 3;
};

void run_bench_command(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = config_or_defaults(a.config, err);
  BenchOptions opts;
  opts.timing_repeats = a.repeats;
  opts.perturb = a.perturb;
  for (const std::string& spec : a.ablate) {
    if (spec == "components") {
      opts.components = true;
    } else if (spec.rfind("ram_drm=", 0) == 0) {
      opts.capacities = parse_capacities(spec.substr(8));
    } else {
      throw std::invalid_argument("--ablate: expected ram_drm=N,... or components, got '" + spec + "'");
    }
  }
  if (opts.perturb && !(*opts.perturb > 0.0 && *opts.perturb < 1.0)) {
    throw std::invalid_argument("--perturb must lie in (0, 1)");
  }
  const auto cases = suite_from_directory(a.suite);
  const BenchReport report = run_bench(cases, cfg, opts);
  OutputGuard guard;
  const fs::path path(a.out);
  ensure_directory(path.parent_path(), guard);
  guard.add(path);
  write_text(path, report_to_json(report).dump(2) + "\n");
  guard.commit();
  out << report_table(report);
}

void run_eval(const std::string& pred_path, const std::string& gt_path, const std::string& events_path,
              const std::string& out_path) {
  const std::vector<Box> pred = read_predictions(pred_path);
  const GroundTruth gt = read_ground_truth(gt_path);
  const auto iou = iou_trace(pred, gt);
  Json doc;
  long long scored = 0;
  for (const auto& v : iou) scored += v ? 1 : 0;
  doc["frames"] = pred.size();
  doc["scored_frames"] = scored;
  doc["mean_iou"] = mean_iou(iou);
  doc["robustness"] = robustness(iou);
  if (!events_path.empty()) {
    const auto events = read_events(events_path);
    if (!events.empty()) {
      const RecoveryStats s = recovery_stats(recovery_events(iou, events));
      doc["recovery_rate"] = s.rate;
      doc["recovery_events"] = s.events;
      doc["recovered"] = s.recovered;
      doc["recf_mean"] = s.mean_latency;
      doc["recf_median"] = s.median_latency;
    }
  }
  OutputGuard guard;
  const fs::path path(out_path);
  ensure_directory(path.parent_path(), guard);
  guard.add(path);
  write_text(path, doc.dump(2) + "\n");
  guard.commit();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EdgeDAM single-object tracker", "edgedam"};
  app.require_subcommand(1, 1);

  TrackArgs ta;
  auto* track = app.add_subcommand("track", "track a target through an image sequence");
  track->add_option("--frames", ta.frames, "directory of PPM/PGM frames")->required();
  track->add_option("--init", ta.init, "initial box x,y,w,h")->required();
  track->add_option("--detections", ta.detections, "detections JSONL")->required();
  track->add_option("--config", ta.config, "config JSON; defaults when absent");
  track->add_option("--out", ta.out, "output JSONL")->required();
  track->add_option("--annotate", ta.annotate, "directory for annotated frames");

  std::string spec_path, synth_out;
  bool suite = false;
  auto* synth = app.add_subcommand("synth", "render a synthetic scenario or the standard suite");
  auto* spec_opt = synth->add_option("--spec", spec_path, "scenario spec JSON");
  synth->add_flag("--suite", suite, "render the 30-scenario standard suite")->excludes(spec_opt);
  synth->add_option("--out", synth_out, "output directory")->required();

  BenchArgs ba;
  double perturb = 0.0;
  auto* bench = app.add_subcommand("bench", "run the benchmark over a generated suite");
  bench->add_option("--suite", ba.suite, "suite directory")->required();
  bench->add_option("--config", ba.config, "config JSON; defaults when absent");
  bench->add_option("--out", ba.out, "report JSON")->required();
  bench->add_option("--ablate", ba.ablate, "ram_drm=5,10,15,20 or components");
  auto* perturb_opt = bench->add_option("--perturb", perturb, "scale every threshold by 1 +/- p");
  bench->add_option("--repeats", ba.repeats, "timing repeats per capacity row")->check(CLI::PositiveNumber);

  std::string pred_path, gt_path, events_path, eval_out;
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  eval->add_option("--pred", pred_path, "predictions JSONL")->required();
  eval->add_option("--gt", gt_path, "ground-truth JSONL")->required();
  eval->add_option("--events", events_path, "occlusion events JSON");
  eval->add_option("--out", eval_out, "metrics JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (track->parsed()) {
      run_track(ta, err);
    } else if (synth->parsed()) {
      run_synth(spec_path, suite, synth_out);
    } else if (bench->parsed()) {
      if (perturb_opt->count() > 0) ba.perturb = perturb;
      run_bench_command(ba, out, err);
    } else if (eval->parsed()) {
      run_eval(pred_path, gt_path, events_path, eval_out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace edgedam
