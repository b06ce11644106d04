#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "edgedam/appearance.hpp"
#include "edgedam/geometry.hpp"

namespace edgedam {

/// Fixed-capacity FIFO; pushing into a full buffer drops the oldest element.
template <typename T>
class BoundedFifo {
 public:
  explicit BoundedFifo(std::size_t capacity) : capacity_(capacity) {}

  /// Returns true when an element was evicted.
  bool push(T value) {
    items_.push_back(std::move(value));
    if (items_.size() > capacity_) {
      items_.pop_front();
      return true;
    }
    return false;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  const T& operator[](std::size_t i) const { return items_[i]; }
  const T& front() const { return items_.front(); }
  const T& back() const { return items_.back(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  void clear() { items_.clear(); }

 private:
  std::size_t capacity_;
  std::deque<T> items_;
};

struct RamEntry {
  Box box;
  Descriptor descriptor;
  std::int64_t timestamp = 0;
};

struct DrmEntry {
  Box box;
  Descriptor descriptor;
  std::int64_t promoted_at = 0;
};

struct DamConfig {
  int ram_capacity = 10;
  int drm_capacity = 10;
  double tau_in = 0.50;
  double tau_a = 0.20;
  double tau_sim = 0.85;
  int window_W = 5;
  int m_min = 3;
  double lambda_iou = 0.4;
  double lambda_app = 0.3;
  double lambda_mot = 0.2;
  double lambda_time = 0.1;
  double alpha = 0.05;
  double gamma = 0.25;
  double tau_acc = 0.30;
  int neg_capacity = 20;
  double epsilon = 1e-6;
  double drm_duplicate_cos = 0.98;

  /// Throws std::invalid_argument naming the first out-of-domain field.
  void validate() const;
};

using RecentMemory = BoundedFifo<RamEntry>;
using AnchorMemory = BoundedFifo<DrmEntry>;
using NegativeBank = BoundedFifo<Descriptor>;

/// Median area of the RAM boxes; the mean of the middle pair for even counts.
std::optional<double> median_area(const RecentMemory& ram);

/// Both clauses of the admission gate, evaluated without touching memory.
struct AdmissionCheck {
  double iou = 0.0;
  double reference_area = 0.0;
  double area_deviation = 0.0;
  bool iou_ok = false;
  bool area_ok = false;
  bool admitted() const { return iou_ok && area_ok; }
};

AdmissionCheck check_admission(const Box& candidate, const Box& prev, const RecentMemory& ram,
                               const DamConfig& cfg);

/// Number of the newest `window_W` RAM descriptors (the newest included) whose
/// cosine to the newest reaches tau_sim.
int agreement_count(const RecentMemory& ram, const DamConfig& cfg);

double score_anchor(const DrmEntry& entry, const Box& b_ref, const Descriptor& phi_ref,
                    double motion_prior, std::int64_t t, const DamConfig& cfg);

/// Largest cosine between `psi` and any negative; 0 for an empty bank.
double max_negative_similarity(const Descriptor& psi, const NegativeBank& bank);
double penalized_score(double score, const Descriptor& psi, const NegativeBank& bank,
                       const DamConfig& cfg);

struct AnchorMatch {
  std::size_t index = 0;
  DrmEntry entry;
  double score = 0.0;
};

/// Highest penalised score over all anchors, returned only when it reaches
/// tau_acc. `motion_priors` holds one value per anchor, in DRM order. Equal
/// scores resolve to the most recently promoted anchor.
std::optional<AnchorMatch> best_anchor(const AnchorMemory& drm, const Box& b_ref,
                                       const Descriptor& phi_ref,
                                       std::span<const double> motion_priors, std::int64_t t,
                                       const NegativeBank& bank, const DamConfig& cfg);

struct AdmissionRecord {
  std::int64_t t = 0;
  Box candidate;
  Box prev;
  AdmissionCheck check;
  bool bypass = false;
  bool admitted = false;
};

struct PromotionRecord {
  std::int64_t t = 0;
  int agreement = 0;
  bool promoted = false;
  bool duplicate = false;
};

/// RAM, DRM and negative bank of one tracking session.
class DistractorAwareMemory {
 public:
  explicit DistractorAwareMemory(DamConfig cfg, bool audit = false);

  const DamConfig& config() const { return cfg_; }
  const RecentMemory& ram() const { return ram_; }
  const AnchorMemory& drm() const { return drm_; }
  const NegativeBank& negatives() const { return negatives_; }

  /// Gate against `prev`; appends on success.
  bool ram_admit(const Box& candidate, const Descriptor& descriptor, const Box& prev,
                 std::int64_t t);
  /// Area clause only, for boxes whose location is verified elsewhere.
  bool ram_admit_bypass(const Box& candidate, const Descriptor& descriptor, std::int64_t t);
  /// Unconditional append (first-frame box).
  void ram_insert(const Box& box, const Descriptor& descriptor, std::int64_t t);

  /// Copies the newest RAM entry into DRM when enough recent descriptors agree.
  bool try_promote(std::int64_t t);

  void add_negative(Descriptor descriptor);

  std::optional<AnchorMatch> best_anchor(const Box& b_ref, const Descriptor& phi_ref,
                                         std::span<const double> motion_priors,
                                         std::int64_t t) const;

  const std::vector<AdmissionRecord>& admission_log() const { return admissions_; }
  const std::vector<PromotionRecord>& promotion_log() const { return promotions_; }

 private:
  DamConfig cfg_;
  bool audit_;
  RecentMemory ram_;
  AnchorMemory drm_;
  NegativeBank negatives_;
  std::vector<AdmissionRecord> admissions_;
  std::vector<PromotionRecord> promotions_;
};

}  // namespace edgedam
