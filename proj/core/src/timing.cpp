#include "franson/timing.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "franson/rng.hpp"

namespace franson::timing {

namespace {
// Source-to-detector latency common to both sides; only differences in
// arrival time are observable.
constexpr double kBaseLatencyNs = 0.0;
// Gaussian sigma for a pulse quoted by its FWHM.
constexpr double kFwhmToSigma = 1.0 / 2.355;
}  // namespace

TimingScales::TimingScales(double pulse_width_ns, double arm_delay_ns,
                           double coherence_time_ns, double lambda_p_um)
    : pulse_width_ns_(pulse_width_ns),
      arm_delay_ns_(arm_delay_ns),
      coherence_time_ns_(coherence_time_ns),
      lambda_p_um_(lambda_p_um) {
  if (!(pulse_width_ns > 0.0) || !(arm_delay_ns > 0.0) ||
      !(coherence_time_ns >= 0.0) || !(lambda_p_um > 0.0)) {
    throw std::invalid_argument("TimingScales: scales must be positive");
  }
  if (!(coherence_time_ns < arm_delay_ns && arm_delay_ns < pulse_width_ns)) {
    throw std::invalid_argument(
        "TimingScales: require coherence < arm delay < pulse width");
  }
}

TimingScales default_scales() { return TimingScales(20.0, 2.0, 1e-4, 0.3511); }

TimestampPair arrival_times(hidden::Shape shape, const TimingScales& scales,
                            double u_emit, double g_jitter_a,
                            double g_jitter_b) {
  const double sigma = scales.pulse_width_ns() * kFwhmToSigma;
  const double t_emit = sigma * normal_quantile(u_emit);
  const double tau = scales.coherence_time_ns();
  const double dt = scales.arm_delay_ns();
  TimestampPair pair;
  pair.t_a_ns = t_emit + kBaseLatencyNs + (shape.eta_a == +1 ? dt : 0.0) +
                tau * g_jitter_a;
  pair.t_b_ns = t_emit + kBaseLatencyNs + (shape.eta_b == +1 ? dt : 0.0) +
                tau * g_jitter_b;
  return pair;
}

CoincidenceVerdict coincidence_classify(const TimestampPair& pair,
                                        double window_ns,
                                        const TimingScales& scales) {
  if (!(window_ns > 0.0) || window_ns >= scales.arm_delay_ns()) {
    throw std::invalid_argument(
        "coincidence_classify: need 0 < window < arm delay");
  }
  const double diff = pair.t_a_ns - pair.t_b_ns;
  if (std::abs(diff) <= window_ns) return CoincidenceVerdict::kSimultaneous;
  return diff < 0.0 ? CoincidenceVerdict::kAEarlier
                    : CoincidenceVerdict::kBEarlier;
}

namespace {

CoincidenceVerdict verdict_from_slots(hidden::Shape shape) {
  if (shape.eta_a == shape.eta_b) return CoincidenceVerdict::kSimultaneous;
  return shape.eta_a == -1 ? CoincidenceVerdict::kAEarlier
                           : CoincidenceVerdict::kBEarlier;
}

struct TimedAccumulator {
  mc::BatchResult batch;
  DifferenceHistogram hist;
};

void merge(const TimedAccumulator& part, TimedAccumulator& acc) {
  acc.batch.events.n1 += part.batch.events.n1;
  acc.batch.events.n2 += part.batch.events.n2;
  acc.batch.events.n3 += part.batch.events.n3;
  acc.batch.events.n4 += part.batch.events.n4;
  acc.batch.singles.d_at_a += part.batch.singles.d_at_a;
  acc.batch.singles.d_at_b += part.batch.singles.d_at_b;
  acc.hist.n_minus += part.hist.n_minus;
  acc.hist.n_zero += part.hist.n_zero;
  acc.hist.n_plus += part.hist.n_plus;
  acc.hist.n_outside += part.hist.n_outside;
  acc.hist.n_verdict_agree += part.hist.n_verdict_agree;
}

}  // namespace

TimedBatchResult run_timed_batch(const qm::ExperimentSetting& setting,
                                 const TimingScales& scales,
                                 const mc::RunSpec& spec, double window_ns,
                                 unsigned threads) {
  if (spec.n_trials < 1) {
    throw std::invalid_argument("run_timed_batch: n_trials must be >= 1");
  }
  if (spec.batch_size < 1) {
    throw std::invalid_argument("run_timed_batch: batch_size must be >= 1");
  }
  if (!(window_ns > 0.0) || window_ns >= scales.arm_delay_ns()) {
    throw std::invalid_argument(
        "run_timed_batch: need 0 < window < arm delay");
  }
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }

  const double dt = scales.arm_delay_ns();
  const std::uint64_t n_batches =
      (spec.n_trials + spec.batch_size - 1) / spec.batch_size;

  auto run_one_batch = [&](std::uint64_t b, TimedAccumulator& acc) {
    const CounterRng rng(spec.seed, b);
    const std::uint64_t begin = b * spec.batch_size;
    const std::uint64_t end =
        std::min(spec.n_trials, begin + spec.batch_size);
    for (std::uint64_t j = 0; j < end - begin; ++j) {
      // Five variate slots per timed trial: shape, phase, emission,
      // jitter A, jitter B.
      const std::uint64_t base = 5 * j;
      const double u_shape = rng.uniform(base);
      const double u_phase = rng.uniform(base + 1);
      const mc::TrialOutcome out = mc::run_trial(setting, u_shape, u_phase);

      switch (out.event) {
        case mc::EventClass::kSameDetectors: ++acc.batch.events.n1; break;
        case mc::EventClass::kCrossedDetectors: ++acc.batch.events.n2; break;
        case mc::EventClass::kAEarlier: ++acc.batch.events.n3; break;
        case mc::EventClass::kBEarlier: ++acc.batch.events.n4; break;
      }
      if (out.detector_a == mc::Detector::kD) ++acc.batch.singles.d_at_a;
      if (out.detector_b == mc::Detector::kD) ++acc.batch.singles.d_at_b;

      const hidden::Shape shape = mc::sample_shape(u_shape);
      const TimestampPair pair = arrival_times(
          shape, scales, rng.uniform_open(base + 2),
          normal_quantile(rng.uniform_open(base + 3)),
          normal_quantile(rng.uniform_open(base + 4)));

      const double diff = pair.t_a_ns - pair.t_b_ns;
      if (std::abs(diff) <= window_ns) {
        ++acc.hist.n_zero;
      } else if (std::abs(diff - dt) <= window_ns) {
        ++acc.hist.n_plus;
      } else if (std::abs(diff + dt) <= window_ns) {
        ++acc.hist.n_minus;
      } else {
        ++acc.hist.n_outside;
      }

      if (coincidence_classify(pair, window_ns, scales) ==
          verdict_from_slots(shape)) {
        ++acc.hist.n_verdict_agree;
      }
    }
  };

  TimedAccumulator total;
  if (threads <= 1 || n_batches <= 1) {
    for (std::uint64_t b = 0; b < n_batches; ++b) run_one_batch(b, total);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<TimedAccumulator> partials(threads);
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

  total.batch.events.n_total = spec.n_trials;
  total.hist.arm_delay_ns = dt;
  total.hist.n_total = spec.n_trials;
  return {total.batch, total.hist};
}

DifferenceHistogram time_difference_histogram(std::uint64_t n,
                                              const TimingScales& scales,
                                              double window_ns,
                                              std::uint64_t seed,
                                              unsigned threads) {
  if (n < 1) {
    throw std::invalid_argument("time_difference_histogram: n must be >= 1");
  }
  const qm::ExperimentSetting setting(0.0, scales.lambda_p_um());
  mc::RunSpec spec;
  spec.seed = seed;
  spec.n_trials = n;
  return run_timed_batch(setting, scales, spec, window_ns, threads).histogram;
}

}  // namespace franson::timing
