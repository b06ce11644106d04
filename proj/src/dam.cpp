#include "edgedam/dam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edgedam {

void DamConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("invalid DAM setting: ") + field);
  };
  require(ram_capacity >= 1, "ram_capacity");
  require(drm_capacity >= 1, "drm_capacity");
  require(neg_capacity >= 1, "neg_capacity");
  require(tau_in >= 0.0 && tau_in <= 1.0, "tau_in");
  require(tau_a >= 0.0, "tau_a");
  require(tau_sim >= 0.0 && tau_sim <= 1.0, "tau_sim");
  require(window_W >= 1, "window_W");
  require(m_min >= 1, "m_min");
  require(lambda_iou >= 0.0, "lambda_iou");
  require(lambda_app >= 0.0, "lambda_app");
  require(lambda_mot >= 0.0, "lambda_mot");
  require(lambda_time >= 0.0, "lambda_time");
  require(alpha >= 0.0, "alpha");
  require(gamma >= 0.0, "gamma");
  require(std::isfinite(tau_acc), "tau_acc");
  require(epsilon > 0.0, "epsilon");
  require(drm_duplicate_cos >= 0.0 && drm_duplicate_cos <= 1.0, "drm_duplicate_cos");
}

std::optional<double> median_area(const RecentMemory& ram) {
  if (ram.empty()) return std::nullopt;
  std::vector<double> areas;
  areas.reserve(ram.size());
  for (const RamEntry& e : ram) areas.push_back(area(e.box));
  std::sort(areas.begin(), areas.end());
  const std::size_t n = areas.size();
  if (n % 2 == 1) return areas[n / 2];
  return 0.5 * (areas[n / 2 - 1] + areas[n / 2]);
}

AdmissionCheck check_admission(const Box& candidate, const Box& prev, const RecentMemory& ram,
                               const DamConfig& cfg) {
  AdmissionCheck c;
  c.iou = iou(candidate, prev);
  c.iou_ok = c.iou >= cfg.tau_in;
  const double a = area(candidate);
  c.reference_area = median_area(ram).value_or(a);
  c.area_deviation = std::abs((a - c.reference_area) / (c.reference_area + cfg.epsilon));
  c.area_ok = c.area_deviation <= cfg.tau_a;
  return c;
}

int agreement_count(const RecentMemory& ram, const DamConfig& cfg) {
  if (ram.empty()) return 0;
  const Descriptor& newest = ram.back().descriptor;
  const std::size_t window = std::min<std::size_t>(ram.size(), cfg.window_W);
  int count = 0;
  for (std::size_t k = ram.size() - window; k < ram.size(); ++k) {
    if (cosine(ram[k].descriptor, newest) >= cfg.tau_sim) ++count;
  }
  return count;
}

double score_anchor(const DrmEntry& entry, const Box& b_ref, const Descriptor& phi_ref,
                    double motion_prior, std::int64_t t, const DamConfig& cfg) {
  if (t < entry.promoted_at) {
    throw std::invalid_argument("anchor promoted after the scoring frame");
  }
  const double age = static_cast<double>(t - entry.promoted_at);
  return cfg.lambda_iou * iou(entry.box, b_ref) +
         cfg.lambda_app * cosine(entry.descriptor, phi_ref) + cfg.lambda_mot * motion_prior +
         cfg.lambda_time * std::exp(-cfg.alpha * age);
}

double max_negative_similarity(const Descriptor& psi, const NegativeBank& bank) {
  double best = 0.0;
  bool any = false;
  for (const Descriptor& nu : bank) {
    const double c = cosine(psi, nu);
    if (!any || c > best) best = c;
    any = true;
  }
  return any ? best : 0.0;
}

double penalized_score(double score, const Descriptor& psi, const NegativeBank& bank,
                       const DamConfig& cfg) {
  if (bank.empty()) return score;
  return score - cfg.gamma * max_negative_similarity(psi, bank);
}

std::optional<AnchorMatch> best_anchor(const AnchorMemory& drm, const Box& b_ref,
                                       const Descriptor& phi_ref,
                                       std::span<const double> motion_priors, std::int64_t t,
                                       const NegativeBank& bank, const DamConfig& cfg) {
  if (motion_priors.size() != drm.size()) {
    throw std::invalid_argument("one motion prior per anchor is required");
  }
  std::optional<AnchorMatch> best;
  for (std::size_t k = 0; k < drm.size(); ++k) {
    const DrmEntry& e = drm[k];
    const double s = penalized_score(score_anchor(e, b_ref, phi_ref, motion_priors[k], t, cfg),
                                     e.descriptor, bank, cfg);
    // Later entries were promoted later, so >= hands ties to the newest.
    if (!best || s >= best->score) best = AnchorMatch{k, e, s};
  }
  if (best && best->score >= cfg.tau_acc) return best;
  return std::nullopt;
}

DistractorAwareMemory::DistractorAwareMemory(DamConfig cfg, bool audit)
    : cfg_(cfg),
      audit_(audit),
      ram_((cfg.validate(), static_cast<std::size_t>(cfg.ram_capacity))),
      drm_(static_cast<std::size_t>(cfg.drm_capacity)),
      negatives_(static_cast<std::size_t>(cfg.neg_capacity)) {}

bool DistractorAwareMemory::ram_admit(const Box& candidate, const Descriptor& descriptor,
                                      const Box& prev, std::int64_t t) {
  const AdmissionCheck c = check_admission(candidate, prev, ram_, cfg_);
  if (audit_) admissions_.push_back({t, candidate, prev, c, false, c.admitted()});
  if (!c.admitted()) return false;
  ram_.push({candidate, descriptor, t});
  return true;
}

bool DistractorAwareMemory::ram_admit_bypass(const Box& candidate, const Descriptor& descriptor,
                                             std::int64_t t) {
  const AdmissionCheck c = check_admission(candidate, candidate, ram_, cfg_);
  if (audit_) admissions_.push_back({t, candidate, candidate, c, true, c.admitted()});
  if (!c.admitted()) return false;
  ram_.push({candidate, descriptor, t});
  return true;
}

void DistractorAwareMemory::ram_insert(const Box& box, const Descriptor& descriptor,
                                       std::int64_t t) {
  if (audit_) {
    AdmissionCheck c;
    c.iou = 1.0;
    c.iou_ok = c.area_ok = true;
    c.reference_area = area(box);
    admissions_.push_back({t, box, box, c, true, true});
  }
  ram_.push({box, descriptor, t});
}

bool DistractorAwareMemory::try_promote(std::int64_t t) {
  if (ram_.empty() || ram_.back().timestamp != t) return false;
  PromotionRecord rec{t, agreement_count(ram_, cfg_), false, false};
  if (rec.agreement >= cfg_.m_min) {
    const RamEntry& newest = ram_.back();
    for (const DrmEntry& anchor : drm_) {
      if (cosine(anchor.descriptor, newest.descriptor) >= cfg_.drm_duplicate_cos) {
        rec.duplicate = true;
        break;
      }
    }
    if (!rec.duplicate) {
      drm_.push({newest.box, newest.descriptor, t});
      rec.promoted = true;
    }
  }
  if (audit_) promotions_.push_back(rec);
  return rec.promoted;
}

void DistractorAwareMemory::add_negative(Descriptor descriptor) {
  negatives_.push(std::move(descriptor));
}

std::optional<AnchorMatch> DistractorAwareMemory::best_anchor(
    const Box& b_ref, const Descriptor& phi_ref, std::span<const double> motion_priors,
    std::int64_t t) const {
  return edgedam::best_anchor(drm_, b_ref, phi_ref, motion_priors, t, negatives_, cfg_);
}

}  // namespace edgedam
