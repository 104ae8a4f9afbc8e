// Trial engine: detector response, shape quartiles, slot and event
// bookkeeping, and the deterministic batched runner. Statistical checks
// use fixed seeds and 4-sigma binomial bounds, so they are reproducible,
// not flaky.

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "franson/montecarlo.hpp"
#include "franson/rng.hpp"

using namespace franson;
using namespace franson::mc;

namespace {
qm::ExperimentSetting setting_for_delta_zero() {
  // delta_l = lambda/4 gives S = pi/2, i.e. Delta = 0.
  return qm::ExperimentSetting::from_arm_imbalance(0.3511 / 4.0, 0.3511);
}
}  // namespace

TEST_CASE("detector response splits the circle at zero") {
  CHECK(detector_response(hidden::HiddenPhase(-0.1)) == Detector::kD);
  CHECK(detector_response(hidden::HiddenPhase(0.0)) == Detector::kDPrime);
  CHECK(detector_response(hidden::HiddenPhase(kPi / 2.0)) ==
        Detector::kDPrime);
  CHECK(detector_response(hidden::HiddenPhase(-kPi)) == Detector::kD);
}

TEST_CASE("shape sampling maps quartiles lexicographically") {
  CHECK(sample_shape(0.10).eta_a == -1);
  CHECK(sample_shape(0.10).eta_b == -1);
  CHECK(sample_shape(0.30).eta_a == -1);
  CHECK(sample_shape(0.30).eta_b == +1);
  CHECK(sample_shape(0.60).eta_a == +1);
  CHECK(sample_shape(0.60).eta_b == -1);
  CHECK(sample_shape(0.99).eta_a == +1);
  CHECK(sample_shape(0.99).eta_b == +1);
  // Quartile boundaries belong to the upper cell.
  CHECK(sample_shape(0.25).eta_b == +1);
  CHECK(sample_shape(0.75).eta_a == +1);
  CHECK(sample_shape(0.75).eta_b == +1);
}

TEST_CASE("slots encode early for eta = -1, late for eta = +1") {
  CHECK(slot_for(-1) == TimeSlot::kEarly);
  CHECK(slot_for(+1) == TimeSlot::kLate);
}

TEST_CASE("event classification covers all detector/slot combinations") {
  CHECK(classify_event(Detector::kD, Detector::kD, TimeSlot::kEarly,
                       TimeSlot::kEarly) == EventClass::kSameDetectors);
  CHECK(classify_event(Detector::kD, Detector::kDPrime, TimeSlot::kLate,
                       TimeSlot::kLate) == EventClass::kCrossedDetectors);
  CHECK(classify_event(Detector::kDPrime, Detector::kD, TimeSlot::kEarly,
                       TimeSlot::kLate) == EventClass::kAEarlier);
  CHECK(classify_event(Detector::kD, Detector::kD, TimeSlot::kLate,
                       TimeSlot::kEarly) == EventClass::kBEarlier);

  // Mixed slots ignore the detectors entirely.
  for (Detector a : {Detector::kD, Detector::kDPrime}) {
    for (Detector b : {Detector::kD, Detector::kDPrime}) {
      CHECK(classify_event(a, b, TimeSlot::kEarly, TimeSlot::kLate) ==
            EventClass::kAEarlier);
      CHECK(classify_event(a, b, TimeSlot::kLate, TimeSlot::kEarly) ==
            EventClass::kBEarlier);
    }
  }
}

TEST_CASE("single trials compose the pipeline as documented") {
  // Shape (+1,+1) (u in the last quartile) at Delta = 0: the transform is
  // the identity, both photons land on the same detector in the same
  // (late) slot -> event #1.
  const TrialOutcome same =
      run_trial(setting_for_delta_zero(), 0.9, 0.25);  // phi_A = -pi/2 -> D
  CHECK(same.detector_a == Detector::kD);
  CHECK(same.detector_b == Detector::kD);
  CHECK(same.slot_a == TimeSlot::kLate);
  CHECK(same.slot_b == TimeSlot::kLate);
  CHECK(same.event == EventClass::kSameDetectors);

  // Shape (+1,-1) forces slots (late, early) -> event #4 no matter the
  // detectors.
  const TrialOutcome mixed = run_trial(setting_for_delta_zero(), 0.6, 0.7);
  CHECK(mixed.slot_a == TimeSlot::kLate);
  CHECK(mixed.slot_b == TimeSlot::kEarly);
  CHECK(mixed.event == EventClass::kBEarlier);
}

TEST_CASE("shape (-1,-1) at Delta = pi anti-correlates the detectors") {
  // dtilde = wrap(-pi) = -pi: the transform sends each hidden phase to
  // the opposite detector half, so every equal-shape trial is event #2.
  const auto setting =
      qm::ExperimentSetting::from_arm_imbalance(3.0 * 0.3511 / 4.0, 0.3511);
  CHECK(setting.delta() == doctest::Approx(-kPi));
  const CounterRng rng(31, 0);
  for (std::uint64_t i = 0; i < 10'000; ++i) {
    const TrialOutcome out = run_trial(setting, 0.1, rng.uniform(i));
    CHECK(out.event == EventClass::kCrossedDetectors);
  }
}

TEST_CASE("batch counts are consistent and reproducible") {
  const RunSpec spec{77, 100'000, 1 << 14};
  const auto setting = setting_for_delta_zero();
  const EventCounts first = run_batch(setting, spec);
  const EventCounts second = run_batch(setting, spec);
  CHECK(first.n_total == spec.n_trials);
  CHECK(first.n1 + first.n2 + first.n3 + first.n4 == first.n_total);
  CHECK(first.n1 == second.n1);
  CHECK(first.n2 == second.n2);
  CHECK(first.n3 == second.n3);
  CHECK(first.n4 == second.n4);
}

TEST_CASE("thread count never changes the counts") {
  const RunSpec spec{123, 300'000, 1 << 14};
  const auto setting =
      qm::ExperimentSetting::from_arm_imbalance(0.22, 0.3511);
  const BatchResult one = run_batch_full(setting, spec, 1);
  const BatchResult four = run_batch_full(setting, spec, 4);
  const BatchResult autod = run_batch_full(setting, spec, 0);
  CHECK(one.events.n1 == four.events.n1);
  CHECK(one.events.n2 == four.events.n2);
  CHECK(one.events.n3 == four.events.n3);
  CHECK(one.events.n4 == four.events.n4);
  CHECK(one.singles.d_at_a == four.singles.d_at_a);
  CHECK(one.singles.d_at_b == four.singles.d_at_b);
  CHECK(one.events.n1 == autod.events.n1);
  CHECK(one.singles.d_at_b == autod.singles.d_at_b);
}

TEST_CASE("event rates reproduce the interference pattern at Delta = 0") {
  constexpr std::uint64_t kN = 1'000'000;
  const RunSpec spec{2024, kN, 1 << 16};
  const EventCounts counts = run_batch(setting_for_delta_zero(), spec);
  const double n = static_cast<double>(kN);
  const double four_sigma = 4.0 * std::sqrt(0.25 / n);
  // p1 = 1/2 and p3 + p4 = 1/2 at Delta = 0.
  CHECK(std::abs(static_cast<double>(counts.n1) / n - 0.5) <= four_sigma);
  CHECK(std::abs(static_cast<double>(counts.n3 + counts.n4) / n - 0.5) <=
        four_sigma);
  CHECK(static_cast<double>(counts.n2) / n <=
        4.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("detector marginals stay flat whatever the setting") {
  constexpr std::uint64_t kN = 200'000;
  const double four_sigma = 4.0 * std::sqrt(0.25 / static_cast<double>(kN));
  for (double delta_l : {0.0, 0.1, 0.22, 0.35}) {
    const auto setting =
        qm::ExperimentSetting::from_arm_imbalance(delta_l, 0.3511);
    const BatchResult result =
        run_batch_full(setting, RunSpec{555, kN, 1 << 16});
    CHECK(std::abs(static_cast<double>(result.singles.d_at_a) / kN - 0.5) <=
          four_sigma);
    CHECK(std::abs(static_cast<double>(result.singles.d_at_b) / kN - 0.5) <=
          four_sigma);
  }
}

TEST_CASE("run spec preconditions are enforced") {
  const auto setting = setting_for_delta_zero();
  CHECK_THROWS_AS((void)run_batch(setting, RunSpec{1, 0, 1 << 16}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)run_batch(setting, RunSpec{1, 100, 0}),
                  std::invalid_argument);
}
