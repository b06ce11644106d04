#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "edgedam/dam.hpp"
#include "edgedam/sources.hpp"

namespace edgedam {

enum class AnchorPlacement {
  Anchor,     // reinitialise at the stored anchor box
  Reference,  // anchor size at the predicted reference centre
};

/// Which parts of the system run; the ablation ladder switches them on in
/// order: detector, recent memory, then anchors with the held box.
struct Features {
  bool use_detector = true;
  bool use_ram = true;
  bool use_drm = true;
  bool use_held = true;

  bool operator==(const Features&) const = default;
};

Features tracker_only();
Features with_detector();
Features with_ram();
Features full_system();

struct PipelineConfig {
  double tau_conf = 0.35;
  double tau_jump = 0.30;
  double tau_occ = 0.40;
  double beta = 0.3;
  double tau_match = 0.50;
  double tau_snap = 0.75;
  double tau_ncc = 0.60;
  double ncc_region_factor = 4.0;
  double tau_app = 0.80;
  double snap_w_app = 0.7;
  double snap_w_mot = 0.3;
  double search_factor = 1.5;
  AnchorPlacement stage1_reinit = AnchorPlacement::Reference;
  Features features;
  DamConfig dam;
  SourceConfig sources;

  /// Throws std::invalid_argument naming the first out-of-domain field.
  void validate() const;
};

/// Flat key/value view of every setting, keyed by its configuration name.
std::vector<std::string> config_keys();

/// Real-valued thresholds and weights that a perturbation study may scale.
/// Integers, the ROI scale and the search-region factors are excluded.
std::vector<std::string> perturbable_keys();

double get_real(const PipelineConfig& cfg, const std::string& key);
/// Sets and clamps a real-valued key to its domain.
void set_real_clamped(PipelineConfig& cfg, const std::string& key, double value);

PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& cfg, int indent = 2);

}  // namespace edgedam
