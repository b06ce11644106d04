#include <sstream>

#include "doctest.h"
#include "edgedam/bench.hpp"
#include "edgedam/cli.hpp"
#include "edgedam/formats.hpp"
#include "edgedam/synth.hpp"
#include "helpers.hpp"

using namespace edgedam;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

ScenarioSpec tiny_spec(std::int64_t length, std::uint64_t seed = 3) {
  ScenarioSpec s;
  s.name = "tiny" + std::to_string(seed);
  s.dims = FrameDims(160, 120);
  s.length = length;
  s.seed = seed;
  s.target.color = {40, 180, 90};
  s.target.width = 24;
  s.target.height = 24;
  s.target.path = {{0, {40, 60}}, {length - 1, {40 + 2.0 * (length - 1), 60}}};
  return s;
}

fs::path write_spec(const fs::path& dir, const ScenarioSpec& s) {
  const fs::path p = dir / (s.name + ".json");
  write_text(p, spec_to_json(s).dump(2));
  return p;
}

std::string slurp(const fs::path& p) { return read_text(p); }

}  // namespace

TEST_CASE("cli track") {
  const fs::path root = testutil::temp_dir("cli_track");
  REQUIRE(cli({"synth", "--spec", write_spec(root, tiny_spec(3)).string(), "--out", (root / "sc").string()}).code == 0);
  const std::string init = "28,48,24,24";

  const Run ok = cli({"track", "--frames", (root / "sc" / "frames").string(), "--init", init, "--detections",
                      (root / "sc" / "detections.jsonl").string(), "--out", (root / "out.jsonl").string(),
                      "--annotate", (root / "ann").string()});
  CHECK(ok.code == 0);
  const std::string text = slurp(root / "out.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(fs::exists(root / "ann" / "000002.ppm"));
  const std::string banner = "no --config given";
  CHECK(ok.err.find(banner) != std::string::npos);
  CHECK(ok.err.find(banner, ok.err.find(banner) + 1) == std::string::npos);

  const std::string missing = (root / "nope.jsonl").string();
  const Run bad = cli({"track", "--frames", (root / "sc" / "frames").string(), "--init", init, "--detections",
                       missing, "--out", (root / "out2.jsonl").string(), "--annotate", (root / "ann2").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find(missing) != std::string::npos);
  CHECK_FALSE(fs::exists(root / "out2.jsonl"));
  CHECK_FALSE(fs::exists(root / "ann2"));

  write_text(root / "cfg.json", R"({"tau_conf": 0.3})");
  const Run cfg = cli({"track", "--frames", (root / "sc" / "frames").string(), "--init", init, "--detections",
                       (root / "sc" / "detections.jsonl").string(), "--config", (root / "cfg.json").string(),
                       "--out", (root / "out3.jsonl").string()});
  CHECK(cfg.code == 0);
  CHECK(cfg.err.empty());

  CHECK(cli({"track", "--frames", (root / "sc" / "frames").string()}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
}

TEST_CASE("cli synth") {
  const fs::path root = testutil::temp_dir("cli_synth");
  const fs::path spec = write_spec(root, tiny_spec(5));
  REQUIRE(cli({"synth", "--spec", spec.string(), "--out", (root / "a").string()}).code == 0);
  REQUIRE(cli({"synth", "--spec", spec.string(), "--out", (root / "b").string()}).code == 0);
  for (const char* f : {"detections.jsonl", "gt.jsonl", "events.json", "spec.json", "frames/000004.ppm"}) {
    CAPTURE(f);
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }

  ScenarioSpec off = tiny_spec(40);
  off.name = "off";
  off.target.path = {{0, {40, 60}}, {39, {190, 60}}};
  const Run bad = cli({"synth", "--spec", write_spec(root, off).string(), "--out", (root / "c").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("frame") != std::string::npos);
  CHECK_FALSE(fs::exists(root / "c"));

  CHECK(cli({"synth", "--out", (root / "d").string()}).code == 1);
  CHECK(cli({"synth", "--suite", "--spec", spec.string(), "--out", (root / "d").string()}).code == 1);
}

TEST_CASE("cli eval") {
  const fs::path root = testutil::temp_dir("cli_eval");
  const GroundTruth gt{Box(1, 1, 10, 10), std::nullopt, Box(3, 1, 10, 10)};
  write_text(root / "gt.jsonl", ground_truth_to_jsonl(gt));
  std::vector<TrackOutput> pred;
  pred.push_back({0, Box(1, 1, 10, 10), Mode::Normal, 1.0, 0, false, RecoveryStage::None});
  pred.push_back({1, Box(100, 100, 10, 10), Mode::Holding, 0.0, 0, true, RecoveryStage::Held});
  pred.push_back({2, Box(3, 1, 10, 10), Mode::Normal, 1.0, 0, false, RecoveryStage::None});
  write_text(root / "pred.jsonl", outputs_to_jsonl(pred));
  write_text(root / "events.json", events_to_json({{1, 2}}));

  REQUIRE(cli({"eval", "--pred", (root / "pred.jsonl").string(), "--gt", (root / "gt.jsonl").string(), "--events",
               (root / "events.json").string(), "--out", (root / "m.json").string()})
              .code == 0);
  const Json m = Json::parse(slurp(root / "m.json"));
  CHECK(m["mean_iou"] == 1.0);
  CHECK(m["scored_frames"] == 2);
  CHECK(m["recovery_rate"] == 1.0);

  pred.pop_back();
  write_text(root / "short.jsonl", outputs_to_jsonl(pred));
  const Run bad = cli({"eval", "--pred", (root / "short.jsonl").string(), "--gt", (root / "gt.jsonl").string(),
                       "--out", (root / "m2.json").string()});
  CHECK(bad.code == 1);
  CHECK_FALSE(fs::exists(root / "m2.json"));
}

TEST_CASE("cli bench") {
  const fs::path root = testutil::temp_dir("cli_bench");
  for (std::uint64_t seed : {1u, 2u}) {
    ScenarioSpec s = tiny_spec(40, seed);
    s.occlusions = {OcclusionSpec{15, 5, {150, 150, 150}, 8}};
    REQUIRE(cli({"synth", "--spec", write_spec(root, s).string(), "--out", (root / "suite" / s.name).string()}).code ==
            0);
  }
  const std::vector<std::string> base{"bench", "--suite", (root / "suite").string(), "--ablate", "ram_drm=2,4",
                                      "--repeats", "1"};
  auto with_out = [&](const std::string& name) {
    auto a = base;
    a.push_back("--out");
    a.push_back((root / name).string());
    return a;
  };
  const Run a = cli(with_out("a.json"));
  REQUIRE(a.code == 0);
  CHECK(a.out.find("ram_drm=4-4") != std::string::npos);
  REQUIRE(cli(with_out("b.json")).code == 0);
  const Json ja = Json::parse(slurp(root / "a.json"));
  const Json jb = Json::parse(slurp(root / "b.json"));
  CHECK(strip_timing(ja).dump() == strip_timing(jb).dump());
  CHECK(ja["rows"].size() == 1);
  CHECK(ja["capacity"]["rows"].size() == 2);
  CHECK(ja["rows"][0]["metrics"]["cases"].size() == 2);
  CHECK(strip_timing(ja).dump().find("fps") == std::string::npos);

  auto bad = with_out("c.json");
  bad[4] = "ram_drm=two";
  CHECK(cli(bad).code == 1);
  const Run empty = cli({"bench", "--suite", (root / "nowhere").string(), "--out", (root / "d.json").string()});
  CHECK(empty.code == 1);
  CHECK_FALSE(fs::exists(root / "d.json"));
}
