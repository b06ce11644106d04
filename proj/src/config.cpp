#include "edgedam/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace edgedam {

Features tracker_only() { return {false, false, false, false}; }
Features with_detector() { return {true, false, false, false}; }
Features with_ram() { return {true, true, false, false}; }
Features full_system() { return {true, true, true, true}; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RealField {
  const char* name;
  std::function<double&(PipelineConfig&)> ref;
  double lo;
  double hi;
  bool perturbable;
};

struct IntField {
  const char* name;
  std::function<int&(PipelineConfig&)> ref;
  int lo;
};

struct BoolField {
  const char* name;
  std::function<bool&(PipelineConfig&)> ref;
};

#define EDGEDAM_REF(member) [](PipelineConfig& c) -> auto& { return c.member; }

const std::vector<RealField>& real_fields() {
  static const std::vector<RealField> fields = {
      {"tau_s", EDGEDAM_REF(sources.tau_s), 0.0, 1.0, true},
      {"nms_iou", EDGEDAM_REF(sources.nms_iou), 0.0, 1.0, true},
      {"kappa", EDGEDAM_REF(sources.kappa), 1.0, kInf, false},
      {"tau_in", EDGEDAM_REF(dam.tau_in), 0.0, 1.0, true},
      {"tau_a", EDGEDAM_REF(dam.tau_a), 0.0, kInf, true},
      {"tau_sim", EDGEDAM_REF(dam.tau_sim), 0.0, 1.0, true},
      {"lambda_iou", EDGEDAM_REF(dam.lambda_iou), 0.0, kInf, true},
      {"lambda_app", EDGEDAM_REF(dam.lambda_app), 0.0, kInf, true},
      {"lambda_mot", EDGEDAM_REF(dam.lambda_mot), 0.0, kInf, true},
      {"lambda_time", EDGEDAM_REF(dam.lambda_time), 0.0, kInf, true},
      {"alpha", EDGEDAM_REF(dam.alpha), 0.0, kInf, true},
      {"gamma", EDGEDAM_REF(dam.gamma), 0.0, kInf, true},
      {"tau_acc", EDGEDAM_REF(dam.tau_acc), -kInf, kInf, true},
      {"epsilon", EDGEDAM_REF(dam.epsilon), std::numeric_limits<double>::min(), kInf, false},
      {"drm_duplicate_cos", EDGEDAM_REF(dam.drm_duplicate_cos), 0.0, 1.0, true},
      {"tau_conf", EDGEDAM_REF(tau_conf), 0.0, 1.0, true},
      {"tau_jump", EDGEDAM_REF(tau_jump), 0.0, kInf, true},
      {"tau_occ", EDGEDAM_REF(tau_occ), 0.0, 1.0, true},
      {"beta", EDGEDAM_REF(beta), 0.0, 1.0, true},
      {"tau_match", EDGEDAM_REF(tau_match), 0.0, 1.0, true},
      {"tau_snap", EDGEDAM_REF(tau_snap), -kInf, kInf, true},
      {"tau_ncc", EDGEDAM_REF(tau_ncc), -1.0, 1.0, true},
      {"tau_app", EDGEDAM_REF(tau_app), 0.0, 1.0, true},
      {"snap_w_app", EDGEDAM_REF(snap_w_app), 0.0, kInf, true},
      {"snap_w_mot", EDGEDAM_REF(snap_w_mot), 0.0, kInf, true},
      {"ncc_region_factor", EDGEDAM_REF(ncc_region_factor), 1.0, kInf, false},
      {"search_factor", EDGEDAM_REF(search_factor), 1.0, kInf, false},
  };
  return fields;
}

const std::vector<IntField>& int_fields() {
  static const std::vector<IntField> fields = {
      {"delta", EDGEDAM_REF(sources.stride_delta), 1},
      {"ram_capacity", EDGEDAM_REF(dam.ram_capacity), 1},
      {"drm_capacity", EDGEDAM_REF(dam.drm_capacity), 1},
      {"window_W", EDGEDAM_REF(dam.window_W), 1},
      {"m_min", EDGEDAM_REF(dam.m_min), 1},
      {"neg_capacity", EDGEDAM_REF(dam.neg_capacity), 1},
  };
  return fields;
}

const std::vector<BoolField>& bool_fields() {
  static const std::vector<BoolField> fields = {
      {"use_detector", EDGEDAM_REF(features.use_detector)},
      {"use_ram", EDGEDAM_REF(features.use_ram)},
      {"use_drm", EDGEDAM_REF(features.use_drm)},
      {"use_held", EDGEDAM_REF(features.use_held)},
  };
  return fields;
}

#undef EDGEDAM_REF

const RealField& real_field(const std::string& key) {
  for (const RealField& f : real_fields()) {
    if (key == f.name) return f;
  }
  throw std::invalid_argument("unknown real-valued config key '" + key + "'");
}

const char* placement_name(AnchorPlacement p) {
  return p == AnchorPlacement::Anchor ? "anchor" : "reference";
}

}  // namespace

void PipelineConfig::validate() const {
  PipelineConfig copy = *this;
  for (const RealField& f : real_fields()) {
    const double v = f.ref(copy);
    if (!std::isfinite(v) || v < f.lo || v > f.hi) {
      throw std::invalid_argument(std::string("config value out of range: ") + f.name);
    }
  }
  for (const IntField& f : int_fields()) {
    if (f.ref(copy) < f.lo) throw std::invalid_argument(std::string("config value out of range: ") + f.name);
  }
  if (features.use_ram && !features.use_detector) {
    throw std::invalid_argument("use_ram requires use_detector");
  }
  if ((features.use_drm || features.use_held) && !features.use_ram) {
    throw std::invalid_argument("use_drm and use_held require use_ram");
  }
  dam.validate();
  sources.validate();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : real_fields()) keys.emplace_back(f.name);
  for (const auto& f : int_fields()) keys.emplace_back(f.name);
  for (const auto& f : bool_fields()) keys.emplace_back(f.name);
  keys.emplace_back("stage1_reinit");
  return keys;
}

std::vector<std::string> perturbable_keys() {
  std::vector<std::string> keys;
  for (const auto& f : real_fields()) {
    if (f.perturbable) keys.emplace_back(f.name);
  }
  return keys;
}

double get_real(const PipelineConfig& cfg, const std::string& key) {
  PipelineConfig copy = cfg;
  return real_field(key).ref(copy);
}

void set_real_clamped(PipelineConfig& cfg, const std::string& key, double value) {
  const RealField& f = real_field(key);
  f.ref(cfg) = std::clamp(value, f.lo, f.hi);
}

PipelineConfig parse_config(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("config must be a JSON object");

  PipelineConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    auto bad_type = [&](const char* want) {
      return std::runtime_error("config key '" + key + "' must be " + want);
    };
    bool known = false;
    for (const RealField& f : real_fields()) {
      if (key != f.name) continue;
      if (!value.is_number()) throw bad_type("a number");
      f.ref(cfg) = value.get<double>();
      known = true;
    }
    for (const IntField& f : int_fields()) {
      if (key != f.name) continue;
      if (!value.is_number_integer()) throw bad_type("an integer");
      f.ref(cfg) = value.get<int>();
      known = true;
    }
    for (const BoolField& f : bool_fields()) {
      if (key != f.name) continue;
      if (!value.is_boolean()) throw bad_type("a boolean");
      f.ref(cfg) = value.get<bool>();
      known = true;
    }
    if (key == "stage1_reinit") {
      if (!value.is_string()) throw bad_type("\"anchor\" or \"reference\"");
      const auto s = value.get<std::string>();
      if (s == "anchor") {
        cfg.stage1_reinit = AnchorPlacement::Anchor;
      } else if (s == "reference") {
        cfg.stage1_reinit = AnchorPlacement::Reference;
      } else {
        throw bad_type("\"anchor\" or \"reference\"");
      }
      known = true;
    }
    if (!known) throw std::runtime_error("unknown config key '" + key + "'");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const PipelineConfig& cfg, int indent) {
  PipelineConfig copy = cfg;
  nlohmann::ordered_json doc;
  for (const auto& f : real_fields()) doc[f.name] = f.ref(copy);
  for (const auto& f : int_fields()) doc[f.name] = f.ref(copy);
  for (const auto& f : bool_fields()) doc[f.name] = f.ref(copy);
  doc["stage1_reinit"] = placement_name(cfg.stage1_reinit);
  return doc.dump(indent);
}

}  // namespace edgedam
