#include <cmath>
#include <random>

#include "doctest.h"
#include "edgedam/dam.hpp"

using namespace edgedam;

namespace {

Descriptor one_hot(std::size_t i, std::size_t n = 8) {
  std::vector<double> v(n, 0.0);
  v[i] = 1.0;
  return Descriptor(v);
}

Descriptor mix(double c, std::size_t n = 8) {
  // cosine c against one_hot(0)
  std::vector<double> v(n, 0.0);
  v[0] = c;
  v[1] = std::sqrt(1.0 - c * c);
  return Descriptor(v);
}

RecentMemory ram_with_areas(std::initializer_list<double> sides_w) {
  RecentMemory ram(10);
  std::int64_t t = 0;
  for (double w : sides_w) ram.push({Box(0, 0, w, 10), one_hot(0), t++});
  return ram;
}

}  // namespace

TEST_CASE("median area") {
  CHECK(!median_area(RecentMemory(3)).has_value());
  CHECK(*median_area(ram_with_areas({10})) == 100.0);
  CHECK(*median_area(ram_with_areas({40, 10, 20})) == 200.0);
  CHECK(*median_area(ram_with_areas({10, 20})) == 150.0);
}

TEST_CASE("admission gate") {
  const DamConfig cfg;
  const RecentMemory ram = ram_with_areas({10});
  const Box prev(0, 0, 10, 10);
  CHECK(check_admission(prev, prev, ram, cfg).admitted());

  const AdmissionCheck tall = check_admission(Box(0, 0, 10, 13), prev, ram, cfg);
  CHECK(tall.iou == doctest::Approx(100.0 / 130.0));
  CHECK(tall.iou_ok);
  CHECK(tall.area_deviation == doctest::Approx(30.0 / 100.000001));
  CHECK_FALSE(tall.area_ok);

  const AdmissionCheck shifted = check_admission(Box(6, 0, 10, 10), prev, ram, cfg);
  CHECK(shifted.iou == doctest::Approx(0.25));
  CHECK_FALSE(shifted.admitted());

  DistractorAwareMemory dam(cfg, true);
  dam.ram_insert(prev, one_hot(0), 0);
  CHECK_FALSE(dam.ram_admit(Box(6, 0, 10, 10), one_hot(0), prev, 1));
  CHECK(dam.ram().size() == 1);
  CHECK(dam.ram_admit(Box(1, 0, 10, 10), one_hot(0), prev, 1));
  CHECK(dam.ram().size() == 2);
  CHECK(dam.admission_log().size() == 3);
  CHECK(dam.ram_admit_bypass(Box(300, 300, 10, 10), one_hot(0), 2));
  CHECK_FALSE(dam.ram_admit_bypass(Box(300, 300, 20, 20), one_hot(0), 3));
}

TEST_CASE("promotion") {
  DamConfig cfg;
  SUBCASE("identical descriptors promote") {
    DistractorAwareMemory dam(cfg);
    for (int t = 0; t < 5; ++t) dam.ram_insert(Box(0, 0, 10, 10), one_hot(0), t);
    CHECK(agreement_count(dam.ram(), cfg) == 5);
    CHECK(dam.try_promote(4));
    CHECK(dam.drm().size() == 1);
    CHECK(dam.drm().back().promoted_at == 4);
  }
  SUBCASE("too few agreeing") {
    DistractorAwareMemory dam(cfg);
    dam.ram_insert(Box(0, 0, 10, 10), one_hot(1), 0);
    dam.ram_insert(Box(0, 0, 10, 10), one_hot(2), 1);
    dam.ram_insert(Box(0, 0, 10, 10), one_hot(3), 2);
    dam.ram_insert(Box(0, 0, 10, 10), mix(0.9), 3);
    dam.ram_insert(Box(0, 0, 10, 10), one_hot(0), 4);
    CHECK(agreement_count(dam.ram(), cfg) == 2);
    CHECK_FALSE(dam.try_promote(4));
  }
  SUBCASE("short history") {
    DistractorAwareMemory dam(cfg);
    dam.ram_insert(Box(0, 0, 10, 10), one_hot(0), 0);
    dam.ram_insert(Box(0, 0, 10, 10), one_hot(0), 1);
    CHECK_FALSE(dam.try_promote(1));
  }
  SUBCASE("near duplicates are skipped") {
    DistractorAwareMemory dam(cfg, true);
    for (int t = 0; t < 4; ++t) dam.ram_insert(Box(0, 0, 10, 10), one_hot(0), t);
    CHECK(dam.try_promote(3));
    dam.ram_insert(Box(0, 0, 10, 10), one_hot(0), 4);
    CHECK_FALSE(dam.try_promote(4));
    CHECK(dam.promotion_log().back().duplicate);
    CHECK(dam.drm().size() == 1);
  }
  SUBCASE("only the current frame's entry") {
    DistractorAwareMemory dam(cfg);
    for (int t = 0; t < 4; ++t) dam.ram_insert(Box(0, 0, 10, 10), one_hot(0), t);
    CHECK_FALSE(dam.try_promote(9));
  }
}

TEST_CASE("anchor score") {
  const DamConfig cfg;
  const Box b(0, 0, 10, 10);
  const DrmEntry e{b, one_hot(0), 5};
  CHECK(score_anchor(e, b, one_hot(0), 1.0, 5, cfg) == doctest::Approx(1.0));
  const DrmEntry far{Box(100, 100, 10, 10), one_hot(0), 0};
  CHECK(score_anchor(far, b, one_hot(1), 0.0, 20, cfg) == doctest::Approx(0.1 * std::exp(-1.0)));
  CHECK(score_anchor(far, b, one_hot(1), 0.0, 100000, cfg) < 1e-12);
  CHECK_THROWS_AS(score_anchor(e, b, one_hot(0), 1.0, 4, cfg), std::invalid_argument);
}

TEST_CASE("negative penalty") {
  const DamConfig cfg;
  NegativeBank bank(3);
  CHECK(penalized_score(0.8, one_hot(0), bank, cfg) == 0.8);
  bank.push(mix(0.9));
  CHECK(penalized_score(0.8, one_hot(0), bank, cfg) == doctest::Approx(0.575));
  bank.push(one_hot(0));
  CHECK(penalized_score(0.8, one_hot(0), bank, cfg) == doctest::Approx(0.8 - cfg.gamma));
}

TEST_CASE("best anchor") {
  const DamConfig cfg;
  const Box b(0, 0, 10, 10);
  const NegativeBank bank(4);
  AnchorMemory drm(4);
  CHECK(!best_anchor(drm, b, one_hot(0), {}, 0, bank, cfg));
  drm.push({b, mix(2.0 / 3.0), 0});
  const std::vector<double> pi{1.0};
  const auto m = best_anchor(drm, b, one_hot(0), pi, 0, bank, cfg);
  REQUIRE(m);
  CHECK(m->score == doctest::Approx(0.9));
  CHECK(m->index == 0);

  drm.push({b, mix(2.0 / 3.0), 0});
  const std::vector<double> pi2{1.0, 1.0};
  CHECK(best_anchor(drm, b, one_hot(0), pi2, 0, bank, cfg)->index == 1);
  CHECK_THROWS_AS(best_anchor(drm, b, one_hot(0), pi, 0, bank, cfg), std::invalid_argument);

  AnchorMemory weak(2);
  weak.push({Box(200, 200, 10, 10), one_hot(1), 0});
  CHECK(!best_anchor(weak, b, one_hot(0), pi, 100, bank, cfg));
}

TEST_CASE("bounded FIFO and negative bank") {
  BoundedFifo<int> f(3);
  CHECK_FALSE(f.push(1));
  f.push(2);
  f.push(3);
  CHECK(f.push(4));
  CHECK(f.size() == 3);
  CHECK(f.front() == 2);
  CHECK(f.back() == 4);

  DamConfig cfg;
  cfg.neg_capacity = 2;
  DistractorAwareMemory dam(cfg);
  dam.add_negative(one_hot(0));
  CHECK(dam.negatives().size() == 1);
  dam.add_negative(one_hot(1));
  dam.add_negative(one_hot(2));
  CHECK(dam.negatives().size() == 2);
  CHECK(dam.negatives().front() == one_hot(1));
}

TEST_CASE("config validation") {
  DamConfig cfg;
  cfg.tau_in = 1.5;
  CHECK_THROWS_WITH(cfg.validate(), doctest::Contains("tau_in"));
  cfg = DamConfig{};
  cfg.drm_capacity = 0;
  CHECK_THROWS_AS(DistractorAwareMemory{cfg}, std::invalid_argument);
}
