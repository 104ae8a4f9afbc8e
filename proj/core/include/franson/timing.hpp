#pragma once

#include <cstdint>

#include "franson/montecarlo.hpp"

namespace franson::timing {

/// Characteristic scales of the physical setup. The ordering
/// coherence_time < arm_delay < pulse_width is enforced at construction;
/// a zero coherence time (no jitter) is permitted as the idealized limit.
class TimingScales {
 public:
  TimingScales(double pulse_width_ns, double arm_delay_ns,
               double coherence_time_ns, double lambda_p_um);

  double pulse_width_ns() const { return pulse_width_ns_; }
  double arm_delay_ns() const { return arm_delay_ns_; }
  double coherence_time_ns() const { return coherence_time_ns_; }
  double lambda_p_um() const { return lambda_p_um_; }
  double coherence_bandwidth_per_ns() const { return 1.0 / coherence_time_ns_; }

 private:
  double pulse_width_ns_;
  double arm_delay_ns_;
  double coherence_time_ns_;
  double lambda_p_um_;
};

/// T = 20 ns, dt = 2 ns, tau = 1e-4 ns, lambda_p = 0.3511 um.
TimingScales default_scales();

struct TimestampPair {
  double t_a_ns = 0.0;
  double t_b_ns = 0.0;
};

enum class CoincidenceVerdict : std::uint8_t {
  kSimultaneous,
  kAEarlier,
  kBEarlier,
};

/// Detection timestamps for one pair: a shared Gaussian emission time
/// (FWHM = pulse width), the long-arm delay for eta = +1, and Gaussian
/// coherence jitter of width tau per photon. u_emit is uniform in (0, 1);
/// the jitters are standard normal.
TimestampPair arrival_times(hidden::Shape shape, const TimingScales& scales,
                            double u_emit, double g_jitter_a,
                            double g_jitter_b);

/// Offline window classification; requires 0 < window < arm delay, else
/// the three peaks are unresolvable.
CoincidenceVerdict coincidence_classify(const TimestampPair& pair,
                                        double window_ns,
                                        const TimingScales& scales);

/// Arrival-time-difference tallies around the three peaks
/// {-arm_delay, 0, +arm_delay}; differences farther than the window from
/// every peak land in n_outside. n_verdict_agree counts trials whose
/// window verdict matches the shape-derived slot classification.
struct DifferenceHistogram {
  double arm_delay_ns = 0.0;
  std::uint64_t n_minus = 0;
  std::uint64_t n_zero = 0;
  std::uint64_t n_plus = 0;
  std::uint64_t n_outside = 0;
  std::uint64_t n_total = 0;
  std::uint64_t n_verdict_agree = 0;
};

struct TimedBatchResult {
  mc::BatchResult batch;
  DifferenceHistogram histogram;
};

/// Full pipeline with timing bookkeeping attached: every trial draws the
/// usual hidden state plus emission time and jitter (five variates per
/// trial), so event counts share the distribution of mc::run_batch_full
/// without replaying its realizations.
TimedBatchResult run_timed_batch(const qm::ExperimentSetting& setting,
                                 const TimingScales& scales,
                                 const mc::RunSpec& spec, double window_ns,
                                 unsigned threads = 1);

/// Histogram of t_A - t_B over n pairs at zero arm imbalance (the peak
/// masses do not depend on the setting).
DifferenceHistogram time_difference_histogram(std::uint64_t n,
                                              const TimingScales& scales,
                                              double window_ns,
                                              std::uint64_t seed,
                                              unsigned threads = 1);

}  // namespace franson::timing
