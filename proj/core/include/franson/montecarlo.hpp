#pragma once

#include <cstdint>

#include "franson/hidden_transform.hpp"
#include "franson/quantum.hpp"

namespace franson::mc {

enum class Detector : std::uint8_t { kD, kDPrime };
enum class TimeSlot : std::uint8_t { kEarly, kLate };

/// Event classes of the coincidence bookkeeping: #1 same-type detectors in
/// the same slot, #2 crossed detectors in the same slot, #3 photon A
/// earlier, #4 photon B earlier.
enum class EventClass : std::uint8_t {
  kSameDetectors = 1,
  kCrossedDetectors = 2,
  kAEarlier = 3,
  kBEarlier = 4,
};

/// Per-realization hidden state: the phase at exit A plus the shape.
struct HiddenConfig {
  hidden::HiddenPhase phi_a;
  hidden::Shape shape;
};

struct TrialOutcome {
  Detector detector_a;
  Detector detector_b;
  TimeSlot slot_a;
  TimeSlot slot_b;
  EventClass event;
};

struct EventCounts {
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  std::uint64_t n3 = 0;
  std::uint64_t n4 = 0;
  std::uint64_t n_total = 0;

  std::uint64_t channel(int i) const;  // i in 1..4
};

/// Marginal detector tallies (counts of D; D' is the complement).
struct SinglesCounts {
  std::uint64_t d_at_a = 0;
  std::uint64_t d_at_b = 0;
};

struct BatchResult {
  EventCounts events;
  SinglesCounts singles;
};

/// Deterministic batch description. Trials are partitioned into batches
/// of batch_size; batch b draws from counter stream b of the seed, so
/// identical (seed, n_trials, batch_size) gives bit-identical counts for
/// any degree of parallelism.
struct RunSpec {
  std::uint64_t seed = 1;
  std::uint64_t n_trials = 1;
  std::uint64_t batch_size = 1 << 16;
};

/// D for phi in [-pi, 0), D' for phi in [0, pi); same rule at both sides.
Detector detector_response(hidden::HiddenPhase phi);

/// Quartile mapping, lexicographic in (eta_a, eta_b):
/// [0,1/4) -> (-1,-1), [1/4,1/2) -> (-1,+1), [1/2,3/4) -> (+1,-1),
/// [3/4,1) -> (+1,+1).
hidden::Shape sample_shape(double u);

/// EARLY iff eta = -1.
TimeSlot slot_for(int eta);

EventClass classify_event(Detector detector_a, Detector detector_b,
                          TimeSlot slot_a, TimeSlot slot_b);

/// One full realization: shape and hidden phase from the two variates,
/// transformation to exit B, detector responses, slots, event class.
TrialOutcome run_trial(const qm::ExperimentSetting& setting, double u_shape,
                       double u_phase);

/// Event counts plus detector marginals; threads = 0 picks the hardware
/// concurrency. Results do not depend on the thread count.
BatchResult run_batch_full(const qm::ExperimentSetting& setting,
                           const RunSpec& spec, unsigned threads = 1);

EventCounts run_batch(const qm::ExperimentSetting& setting,
                      const RunSpec& spec, unsigned threads = 1);

}  // namespace franson::mc
