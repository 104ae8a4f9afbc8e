#include "franson/montecarlo.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>
#include <vector>

#include "franson/rng.hpp"

namespace franson::mc {

std::uint64_t EventCounts::channel(int i) const {
  switch (i) {
    case 1: return n1;
    case 2: return n2;
    case 3: return n3;
    case 4: return n4;
    default: throw std::invalid_argument("EventCounts: channel must be 1..4");
  }
}

Detector detector_response(hidden::HiddenPhase phi) {
  return phi.value() < 0.0 ? Detector::kD : Detector::kDPrime;
}

hidden::Shape sample_shape(double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::invalid_argument("sample_shape: u must be in [0, 1)");
  }
  switch (static_cast<int>(u * 4.0)) {
    case 0: return {-1, -1};
    case 1: return {-1, +1};
    case 2: return {+1, -1};
    default: return {+1, +1};
  }
}

TimeSlot slot_for(int eta) {
  return eta == -1 ? TimeSlot::kEarly : TimeSlot::kLate;
}

EventClass classify_event(Detector detector_a, Detector detector_b,
                          TimeSlot slot_a, TimeSlot slot_b) {
  if (slot_a == slot_b) {
    return detector_a == detector_b ? EventClass::kSameDetectors
                                    : EventClass::kCrossedDetectors;
  }
  return slot_a == TimeSlot::kEarly ? EventClass::kAEarlier
                                    : EventClass::kBEarlier;
}

TrialOutcome run_trial(const qm::ExperimentSetting& setting, double u_shape,
                       double u_phase) {
  const hidden::Shape shape = sample_shape(u_shape);
  const hidden::EffectivePhase dtilde =
      hidden::effective_phase(shape, setting.delta());
  const hidden::HiddenPhase phi_a = hidden::sample_phase(u_phase);
  const hidden::HiddenPhase phi_b = hidden::transform_phase(phi_a, dtilde);

  TrialOutcome out;
  out.detector_a = detector_response(phi_a);
  out.detector_b = detector_response(phi_b);
  out.slot_a = slot_for(shape.eta_a);
  out.slot_b = slot_for(shape.eta_b);
  out.event = classify_event(out.detector_a, out.detector_b, out.slot_a,
                             out.slot_b);
  return out;
}

namespace {

void tally(const TrialOutcome& out, BatchResult& acc) {
  switch (out.event) {
    case EventClass::kSameDetectors: ++acc.events.n1; break;
    case EventClass::kCrossedDetectors: ++acc.events.n2; break;
    case EventClass::kAEarlier: ++acc.events.n3; break;
    case EventClass::kBEarlier: ++acc.events.n4; break;
  }
  if (out.detector_a == Detector::kD) ++acc.singles.d_at_a;
  if (out.detector_b == Detector::kD) ++acc.singles.d_at_b;
}

void merge(const BatchResult& part, BatchResult& acc) {
  acc.events.n1 += part.events.n1;
  acc.events.n2 += part.events.n2;
  acc.events.n3 += part.events.n3;
  acc.events.n4 += part.events.n4;
  acc.singles.d_at_a += part.singles.d_at_a;
  acc.singles.d_at_b += part.singles.d_at_b;
}

}  // namespace

BatchResult run_batch_full(const qm::ExperimentSetting& setting,
                           const RunSpec& spec, unsigned threads) {
  if (spec.n_trials < 1) {
    throw std::invalid_argument("run_batch: n_trials must be >= 1");
  }
  if (spec.batch_size < 1) {
    throw std::invalid_argument("run_batch: batch_size must be >= 1");
  }
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }

  const std::uint64_t n_batches =
      (spec.n_trials + spec.batch_size - 1) / spec.batch_size;

  auto run_one_batch = [&](std::uint64_t b, BatchResult& acc) {
    const CounterRng rng(spec.seed, b);
    const std::uint64_t begin = b * spec.batch_size;
    const std::uint64_t end =
        std::min(spec.n_trials, begin + spec.batch_size);
    for (std::uint64_t j = 0; j < end - begin; ++j) {
      const double u_shape = rng.uniform(2 * j);
      const double u_phase = rng.uniform(2 * j + 1);
      tally(run_trial(setting, u_shape, u_phase), acc);
    }
  };

  BatchResult total;
  if (threads <= 1 || n_batches <= 1) {
    for (std::uint64_t b = 0; b < n_batches; ++b) run_one_batch(b, total);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<BatchResult> partials(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t b = next.fetch_add(1); b < n_batches;
             b = next.fetch_add(1)) {
          run_one_batch(b, partials[t]);
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& part : partials) merge(part, total);
  }

  total.events.n_total = spec.n_trials;
  return total;
}

EventCounts run_batch(const qm::ExperimentSetting& setting,
                      const RunSpec& spec, unsigned threads) {
  return run_batch_full(setting, spec, threads).events;
}

}  // namespace franson::mc
