#pragma once

#include <cstdint>
#include <string>

#include "franson/montecarlo.hpp"
#include "franson/timing.hpp"

namespace franson {

/// Run configuration shared by the command-line tools. Defaults reproduce
/// the published scales; every field can be overridden from a JSON file
/// or a command-line flag (flags win).
struct Config {
  double lambda_p_um = 0.3511;
  double pulse_width_ns = 20.0;
  double arm_delay_ns = 2.0;
  double coherence_time_ns = 1e-4;
  double window_ns = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t n_trials = 1'000'000;
  std::uint64_t batch_size = 1 << 16;
  std::string output_path;

  timing::TimingScales scales() const;
  mc::RunSpec run_spec() const;

  /// Strict parse: unknown keys, wrong types, or invalid values are
  /// rejected with std::invalid_argument.
  static Config from_json_text(const std::string& text);
  static Config load_file(const std::string& path);

  /// Canonical serialization; from_json_text(to_json_text()) round-trips
  /// to the identical text.
  std::string to_json_text() const;
};

}  // namespace franson
