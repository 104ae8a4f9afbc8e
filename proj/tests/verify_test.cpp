// Verification driver: suite-name parsing, report aggregation, and a fast
// end-to-end run of the cheap suites. The expensive statistical suites run
// at full size in the acceptance binary and through the CLI.

#include "doctest.h"
#include "franson/verify.hpp"

using namespace franson::verify;

TEST_CASE("suite names parse exactly and reject anything else") {
  CHECK(parse_suite("density") == Suite::kDensity);
  CHECK(parse_suite("transform") == Suite::kTransform);
  CHECK(parse_suite("measure") == Suite::kMeasure);
  CHECK(parse_suite("oracle") == Suite::kOracle);
  CHECK(parse_suite("timing") == Suite::kTiming);
  CHECK(parse_suite("all") == Suite::kAll);
  CHECK(!parse_suite("bogus").has_value());
  CHECK(!parse_suite("").has_value());
  CHECK(!parse_suite("Oracle").has_value());
  for (Suite s : {Suite::kDensity, Suite::kTransform, Suite::kMeasure,
                  Suite::kOracle, Suite::kTiming, Suite::kAll}) {
    CHECK(parse_suite(suite_name(s)) == s);
  }
}

TEST_CASE("report passes only when every check passes") {
  Report report{"demo", {}};
  CHECK(report.passed());
  report.checks.push_back({"a", 0.0, 1.0, true});
  CHECK(report.passed());
  report.checks.push_back({"b", 2.0, 1.0, false});
  CHECK(!report.passed());
}

TEST_CASE("oracle suite runs green") {
  const Report report = run_suite(Suite::kOracle, 42);
  CHECK(report.suite == "oracle");
  CHECK(report.checks.size() >= 4);
  CHECK(report.passed());
  for (const auto& check : report.checks) {
    CHECK(check.pass == (check.observed <= check.bound));
  }
}

TEST_CASE("density suite runs green") {
  const Report report = run_suite(Suite::kDensity, 42);
  CHECK(report.passed());
}

TEST_CASE("transform suite runs green") {
  const Report report = run_suite(Suite::kTransform, 42);
  CHECK(report.passed());
}
