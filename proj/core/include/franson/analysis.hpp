#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "franson/montecarlo.hpp"
#include "franson/timing.hpp"

namespace franson::analysis {

/// Binomial point estimate with a z = 4 normal-approximation half-width.
struct ProbEstimate {
  double p_hat = 0.0;
  double ci_half_width = 0.0;
};

/// p_i = n_i / n_total, half-width 4*sqrt(p(1-p)/n_total).
std::array<ProbEstimate, 4> estimate_quad(const mc::EventCounts& counts);

/// One-sample Kolmogorov-Smirnov statistic: sup-norm distance between the
/// empirical CDF of the samples and the given analytic CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

/// Critical distance used throughout (alpha ~ 1e-3): 1.95 / sqrt(n).
double ks_bound(std::uint64_t n);

struct FringeScanRow {
  double delta_l_um = 0.0;
  mc::EventCounts counts;
  std::array<ProbEstimate, 4> quad_hat;
  qm::ProbabilityQuad quad_qm;
};

struct FringeScan {
  double lambda_p_um = 0.3511;
  std::vector<FringeScanRow> rows;
};

/// One run_batch per grid point, each on a seed derived from (spec.seed,
/// point index); attaches the closed-form quad for the same setting.
FringeScan scan_fringes(std::span<const double> delta_l_grid_um,
                        const mc::RunSpec& spec,
                        const timing::TimingScales& scales,
                        unsigned threads = 1);

struct FringeFit {
  double offset = 0.0;      // A
  double amplitude = 0.0;   // B >= 0
  double period_um = 0.0;
  double phase0 = 0.0;      // wrapped to [-pi, pi)
  double visibility = 0.0;  // B / A
  double residual_rms = 0.0;
  double amplitude_stderr = 0.0;  // linearized 1-sigma on B
  int iterations = 0;
};

class FitFailure : public std::runtime_error {
 public:
  FitFailure(const std::string& what, double best_residual_rms)
      : std::runtime_error(what), best_residual_rms_(best_residual_rms) {}
  double best_residual_rms() const { return best_residual_rms_; }

 private:
  double best_residual_rms_;
};

/// Levenberg-Marquardt fit of p_hat(delta_l) = A + B cos(2 pi delta_l /
/// period + phase0) for the chosen channel (1..4). Initialization: A from
/// the mean, B from the half-range, period from the scan's pump
/// wavelength, phase0 from the discrete Fourier component at that period.
/// Requires >= 8 points spanning >= 1.5 initial periods. Throws
/// FitFailure (carrying the best residual) if the iteration does not
/// converge.
FringeFit fit_fringe(const FringeScan& scan, int channel);

/// Reference linear maps the transformation is compared against:
/// kMinus is wrap(phi - dtilde), kPlus is wrap(phi + dtilde).
enum class LinearComparator { kMinus, kPlus };

/// Grid maximum of the wrapped absolute difference between the
/// transformation and the linear comparator, in radians.
double max_deviation_from_linear(std::span<const double> dtilde_grid,
                                 std::span<const double> phi_grid,
                                 LinearComparator comparator);

/// Ordinary least-squares line with the standard error of the slope.
struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

TrendFit linear_trend(std::span<const double> x, std::span<const double> y);

/// CSV schema: delta_l_um, n_total, n1..n4, p1_hat..p4_hat, ci1..ci4,
/// p1_qm..p4_qm; header row, floats with 9 significant digits.
void write_fringe_csv(const FringeScan& scan, std::ostream& os);

/// CSV schema: bin_center_ns, count; one row per peak at
/// {-arm_delay, 0, +arm_delay}.
void write_histogram_csv(const timing::DifferenceHistogram& hist,
                         std::ostream& os);

/// Shortest-width float rendering at 9 significant digits ("%.9g").
std::string format_g9(double value);

}  // namespace franson::analysis
