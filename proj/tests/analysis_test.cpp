// Statistics layer: binomial estimates with z = 4 half-widths, the KS
// statistic, fringe scanning and cosine fitting, deviation-from-linear
// maximization, trend fitting, and the CSV writers.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "franson/analysis.hpp"
#include "franson/hidden_transform.hpp"

using namespace franson;
using namespace franson::analysis;

TEST_CASE("probability estimates carry 4-sigma half-widths") {
  mc::EventCounts even{250, 250, 250, 250, 1000};
  const auto quads = estimate_quad(even);
  for (const auto& est : quads) {
    CHECK(est.p_hat == doctest::Approx(0.25));
    CHECK(est.ci_half_width ==
          doctest::Approx(4.0 * std::sqrt(0.25 * 0.75 / 1000.0)));
  }

  mc::EventCounts half{500, 0, 250, 250, 1000};
  const auto est = estimate_quad(half);
  CHECK(est[0].p_hat == doctest::Approx(0.5));
  CHECK(est[0].ci_half_width == doctest::Approx(0.0632).epsilon(1e-3));
  CHECK(est[1].p_hat == 0.0);
  CHECK(est[1].ci_half_width == 0.0);

  mc::EventCounts all4{0, 0, 0, 1000, 1000};
  const auto degenerate = estimate_quad(all4);
  CHECK(degenerate[3].p_hat == 1.0);
  CHECK(degenerate[3].ci_half_width == 0.0);

  CHECK_THROWS_AS((void)estimate_quad(mc::EventCounts{}),
                  std::invalid_argument);
}

TEST_CASE("KS statistic matches hand-computable cases") {
  // A point mass at 0 against G: G(0) = 1/2, ECDF jumps 0 -> 1 there.
  std::vector<double> point(100, 0.0);
  CHECK(ks_statistic(std::move(point), hidden::phase_cdf) ==
        doctest::Approx(0.5));

  // Samples at the analytic quantiles (k - 1/2)/N interleave the ECDF
  // perfectly: D = 1/(2N).
  constexpr std::size_t kN = 400;
  std::vector<double> stratified(kN);
  for (std::size_t k = 0; k < kN; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / kN;
    stratified[k] = hidden::sample_phase(u).value();
  }
  CHECK(ks_statistic(std::move(stratified), hidden::phase_cdf) ==
        doctest::Approx(1.0 / (2.0 * kN)).epsilon(1e-6));

  CHECK_THROWS_AS((void)ks_statistic({}, hidden::phase_cdf),
                  std::invalid_argument);
}

TEST_CASE("KS bound is the alpha ~ 0.001 critical value") {
  CHECK(ks_bound(1'000'000) == doctest::Approx(0.00195));
  CHECK(ks_bound(400) == doctest::Approx(1.95 / 20.0));
}

namespace {
// Noise-free scan: rows carry the exact outcome probabilities.
FringeScan exact_scan(double lambda_p, double from, double to, double step) {
  FringeScan scan;
  scan.lambda_p_um = lambda_p;
  for (double x = from; x <= to + 1e-12; x += step) {
    FringeScanRow row;
    row.delta_l_um = x;
    row.quad_qm = qm::closed_form_probabilities(kTwoPi * x / lambda_p);
    for (int c = 1; c <= 4; ++c) {
      row.quad_hat[c - 1] = {row.quad_qm.channel(c), 1e-4};
    }
    row.counts.n_total = 1;  // unused by the fitter
    scan.rows.push_back(row);
  }
  return scan;
}
}  // namespace

TEST_CASE("fitting noise-free fringes recovers the generator") {
  const FringeScan scan = exact_scan(0.3511, 0.0, 1.5, 0.05);
  const FringeFit fit = fit_fringe(scan, 1);
  CHECK(std::abs(fit.period_um - 0.3511) / 0.3511 <= 1e-9);
  CHECK(std::abs(fit.offset - 0.25) <= 1e-9);
  CHECK(std::abs(fit.amplitude - 0.25) <= 1e-9);
  CHECK(fit.visibility == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fit.residual_rms <= 1e-9);

  // Channel 2 is the complementary fringe.
  const FringeFit fit2 = fit_fringe(scan, 2);
  CHECK(std::abs(fit2.period_um - 0.3511) / 0.3511 <= 1e-9);
  CHECK(std::abs(fit2.amplitude - 0.25) <= 1e-9);
}

TEST_CASE("fitting a flat channel yields statistically zero amplitude") {
  FringeScan scan = exact_scan(0.3511, 0.0, 1.5, 0.05);
  // Channel three is constant at 1/4; add a deterministic ripple far
  // below any fringe to emulate estimator noise.
  int k = 0;
  for (auto& row : scan.rows) {
    row.quad_hat[2].p_hat = 0.25 + 1e-5 * ((k++ % 2 == 0) ? 1.0 : -1.0);
  }
  try {
    const FringeFit fit = fit_fringe(scan, 3);
    CHECK(fit.amplitude <= 4.0 * fit.amplitude_stderr + 1e-4);
  } catch (const FitFailure&) {
    // A refusal to fit flat data is equally acceptable.
  }
}

TEST_CASE("fit preconditions reject unusable scans") {
  const FringeScan tiny = exact_scan(0.3511, 0.0, 0.1, 0.05);
  CHECK_THROWS_AS((void)fit_fringe(tiny, 1), std::invalid_argument);
  const FringeScan scan = exact_scan(0.3511, 0.0, 1.5, 0.05);
  CHECK_THROWS_AS((void)fit_fringe(scan, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)fit_fringe(scan, 5), std::invalid_argument);
}

TEST_CASE("scan_fringes samples each grid point with a derived seed") {
  const std::vector<double> grid = {0.3511 / 4.0};
  const mc::RunSpec spec{9, 100'000, 1 << 16};
  const FringeScan scan =
      scan_fringes(grid, spec, timing::default_scales(), 1);
  REQUIRE(scan.rows.size() == 1);
  // S = pi/2 -> p1 = 1/2.
  CHECK(std::abs(scan.rows[0].quad_hat[0].p_hat - 0.5) <=
        4.0 * std::sqrt(0.25 / 100'000.0));
  CHECK(scan.rows[0].quad_qm.p1 == doctest::Approx(0.5));

  CHECK_THROWS_AS(
      (void)scan_fringes({}, spec, timing::default_scales(), 1),
      std::invalid_argument);
  const std::vector<double> decreasing = {0.2, 0.1};
  CHECK_THROWS_AS(
      (void)scan_fringes(decreasing, spec, timing::default_scales(), 1),
      std::invalid_argument);
}

TEST_CASE("deviation from the linear comparator") {
  const std::vector<double> zero = {0.0};
  std::vector<double> phis;
  for (double phi = -kPi; phi < kPi; phi += 0.01) phis.push_back(phi);
  // Identity regime: both comparators coincide with L.
  CHECK(max_deviation_from_linear(zero, phis, LinearComparator::kMinus) ==
        0.0);
  CHECK(max_deviation_from_linear(zero, phis, LinearComparator::kPlus) == 0.0);

  // Single evaluation: L(pi/2; pi/3) = pi/3 while the linear map gives
  // pi/2 - pi/3 = pi/6; the circular gap is pi/6.
  const std::vector<double> dt = {kPi / 3.0};
  const std::vector<double> phi = {kPi / 2.0};
  CHECK(max_deviation_from_linear(dt, phi, LinearComparator::kMinus) ==
        doctest::Approx(kPi / 6.0).epsilon(1e-12));

  // Coarse grid maximization stays within the claimed budget of 15% of
  // the full period (the fine grid runs in the acceptance suite).
  std::vector<double> dts;
  for (int i = 0; i < 100; ++i) dts.push_back(-kPi + (i + 0.5) * kTwoPi / 100);
  std::vector<double> phig;
  for (int i = 0; i < 100; ++i) phig.push_back(-kPi + (i + 0.5) * kTwoPi / 100);
  const double dev =
      max_deviation_from_linear(dts, phig, LinearComparator::kMinus);
  CHECK(dev > 0.0);
  CHECK(dev <= 0.15 * kTwoPi);
}

TEST_CASE("linear trend recovers an exact line with zero slope error") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y = {1.0, 1.5, 2.0, 2.5, 3.0};
  const TrendFit fit = linear_trend(x, y);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.slope_stderr <= 1e-12);

  const std::vector<double> two = {0.0, 1.0};
  CHECK_THROWS_AS((void)linear_trend(two, two), std::invalid_argument);
}

TEST_CASE("numbers render with nine significant digits") {
  CHECK(format_g9(0.25) == "0.25");
  CHECK(format_g9(1.0 / 3.0) == "0.333333333");
  CHECK(format_g9(0.0) == "0");
  CHECK(format_g9(123456789.0) == "123456789");
}

TEST_CASE("fringe CSV follows the fixed schema") {
  const FringeScan scan = exact_scan(0.3511, 0.0, 0.2, 0.1);
  std::ostringstream out;
  write_fringe_csv(scan, out);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "delta_l_um,n_total,n1,n2,n3,n4,p1_hat,p2_hat,p3_hat,p4_hat,"
        "ci1,ci2,ci3,ci4,p1_qm,p2_qm,p3_qm,p4_qm");
  std::string row;
  int data_rows = 0;
  while (std::getline(lines, row)) ++data_rows;
  CHECK(data_rows == 3);
}

TEST_CASE("histogram CSV lists the three bins in time order") {
  timing::DifferenceHistogram hist;
  hist.arm_delay_ns = 2.0;
  hist.n_minus = 10;
  hist.n_zero = 20;
  hist.n_plus = 30;
  std::ostringstream out;
  write_histogram_csv(hist, out);
  CHECK(out.str() == "bin_center_ns,count\n-2,10\n0,20\n2,30\n");
}
