#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace franson::verify {

/// One machine-checkable assertion: pass iff observed <= bound.
struct Check {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct Report {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const;
};

enum class Suite { kDensity, kTransform, kMeasure, kOracle, kTiming, kAll };

std::optional<Suite> parse_suite(std::string_view name);
std::string suite_name(Suite suite);

/// Runs the named invariant suite at full statistical size. Bounds are
/// fixed in code; the seed only moves the Monte Carlo draws.
Report run_suite(Suite suite, std::uint64_t seed, unsigned threads = 1);

}  // namespace franson::verify
