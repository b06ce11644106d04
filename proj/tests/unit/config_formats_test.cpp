#include "doctest.h"
#include "edgedam/config.hpp"
#include "edgedam/formats.hpp"
#include "edgedam/pipeline.hpp"

using namespace edgedam;

TEST_CASE("config defaults and round trip") {
  const PipelineConfig d;
  CHECK(get_real(d, "tau_conf") == 0.35);
  CHECK(get_real(d, "tau_jump") == 0.30);
  CHECK(get_real(d, "tau_occ") == 0.40);
  CHECK(get_real(d, "tau_s") == 0.45);
  CHECK(get_real(d, "kappa") == 2.0);
  CHECK(get_real(d, "gamma") == 0.25);
  CHECK(d.dam.ram_capacity == 10);
  CHECK(d.dam.drm_capacity == 10);
  CHECK(d.sources.stride_delta == 3);

  PipelineConfig c;
  c.tau_conf = 0.4;
  c.dam.ram_capacity = 7;
  c.features = with_ram();
  c.stage1_reinit = AnchorPlacement::Anchor;
  const PipelineConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.features == with_ram());

  const auto doc = Json::parse(config_to_json(d));
  CHECK(doc.size() == config_keys().size());
  for (const std::string& k : config_keys()) CHECK(doc.contains(k));
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH(parse_config(R"({"tau_cof": 0.3})"), doctest::Contains("tau_cof"));
  CHECK_THROWS_WITH(parse_config(R"({"tau_conf": "high"})"), doctest::Contains("tau_conf"));
  CHECK_THROWS_WITH(parse_config(R"({"tau_in": 2.0})"), doctest::Contains("tau_in"));
  CHECK_THROWS_WITH(parse_config(R"({"ram_capacity": 2.5})"), doctest::Contains("ram_capacity"));
  CHECK_THROWS(parse_config("[1, 2]"));
  CHECK_THROWS(parse_config("{"));
  CHECK_THROWS_WITH(parse_config(R"({"use_detector": false})"), doctest::Contains("use_ram"));
  CHECK_THROWS_WITH(load_config("/nonexistent/cfg.json"), doctest::Contains("/nonexistent/cfg.json"));
}

TEST_CASE("perturbable keys scale and clamp") {
  const auto keys = perturbable_keys();
  CHECK(!keys.empty());
  for (const char* fixed : {"kappa", "epsilon", "ncc_region_factor", "search_factor"}) {
    CHECK(std::find(keys.begin(), keys.end(), fixed) == keys.end());
  }
  PipelineConfig c;
  set_real_clamped(c, "tau_in", 3.0);
  CHECK(c.dam.tau_in == 1.0);
  set_real_clamped(c, "tau_conf", 0.42);
  CHECK(c.tau_conf == 0.42);
  CHECK_THROWS(get_real(c, "nope"));
}

TEST_CASE("box parsing") {
  CHECK(parse_box("1,2,3,4") == Box(1, 2, 3, 4));
  CHECK(parse_box(" 1.5, 2 ,3,4 ") == Box(1.5, 2, 3, 4));
  CHECK_THROWS(parse_box("1,2,3"));
  CHECK_THROWS(parse_box("1,2,3,x"));
  CHECK_THROWS(parse_box("1,2,0,4"));
  CHECK(box_from_json(box_to_json(Box(0.25, 1, 2, 3))) == Box(0.25, 1, 2, 3));
  CHECK_THROWS(box_from_json(Json{{"x", 1}, {"y", 1}, {"w", 2}}));
}

TEST_CASE("detections file") {
  const std::string text =
      "{\"t\": 0, \"detections\": [{\"x\": 1, \"y\": 2, \"w\": 3, \"h\": 4, \"score\": 0.9}]}\n"
      "\n"
      "{\"t\": 2, \"detections\": []}\n";
  const DetectionScript s = parse_detections(text, "d.jsonl");
  CHECK(s.at(0) == std::vector<Detection>{{Box(1, 2, 3, 4), 0.9}});
  CHECK(s.at(2).empty());
  CHECK(!s.count(1));
  CHECK(parse_detections(detections_to_jsonl(s, 3), "again") .at(0) == s.at(0));

  CHECK_THROWS_WITH(parse_detections("{\"t\": 0}\n", "d.jsonl"), doctest::Contains("d.jsonl:1"));
  CHECK_THROWS_WITH(parse_detections("{\"t\":0,\"detections\":[]}\n{\"t\":0,\"detections\":[]}\n", "d"),
                    doctest::Contains("duplicate"));
  CHECK_THROWS(parse_detections(
      "{\"t\":0,\"detections\":[{\"x\":1,\"y\":2,\"w\":3,\"h\":4,\"score\":1.5}]}\n", "d"));
  CHECK_THROWS_WITH(read_detections("/no/such/dets.jsonl"), doctest::Contains("/no/such/dets.jsonl"));
}

TEST_CASE("ground truth file") {
  const GroundTruth gt{Box(1, 1, 5, 5), std::nullopt, Box(2, 2, 5, 5)};
  CHECK(parse_ground_truth(ground_truth_to_jsonl(gt), "gt") == gt);
  CHECK_THROWS_WITH(parse_ground_truth("{\"t\": 1, \"occluded\": true}\n", "gt.jsonl"),
                    doctest::Contains("expected frame 0"));
}

TEST_CASE("track output records") {
  const TrackOutput out{3, Box(1, 2, 3, 4), Mode::Holding, 0.25, 2, true, RecoveryStage::Held};
  const Json j = output_to_json(out);
  CHECK(j["t"] == 3);
  CHECK(j["mode"] == "HOLDING");
  CHECK(j["o_count"] == 2);
  CHECK(j["switch"] == true);
  CHECK(j["recovery_stage"] == "held");
  CHECK(box_from_json(j["box"]) == Box(1, 2, 3, 4));
  const TrackOutput n{0, Box(1, 2, 3, 4), Mode::Normal, 1.0, 0, false, RecoveryStage::SnapBack};
  CHECK(output_to_json(n)["recovery_stage"] == 2);
  CHECK(output_to_json(n)["mode"] == "NORMAL");
}
