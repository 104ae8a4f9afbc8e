#include "franson/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "franson/hidden_transform.hpp"
#include "franson/rng.hpp"

namespace franson::analysis {

namespace {
constexpr double kConfidenceZ = 4.0;
}

std::array<ProbEstimate, 4> estimate_quad(const mc::EventCounts& counts) {
  if (counts.n_total < 1) {
    throw std::invalid_argument("estimate_quad: n_total must be >= 1");
  }
  const double n = static_cast<double>(counts.n_total);
  std::array<ProbEstimate, 4> quad;
  for (int i = 0; i < 4; ++i) {
    const double p = static_cast<double>(counts.channel(i + 1)) / n;
    quad[i] = {p, kConfidenceZ * std::sqrt(p * (1.0 - p) / n)};
  }
  return quad;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_bound(std::uint64_t n) {
  return 1.95 / std::sqrt(static_cast<double>(n));
}

FringeScan scan_fringes(std::span<const double> delta_l_grid_um,
                        const mc::RunSpec& spec,
                        const timing::TimingScales& scales, unsigned threads) {
  if (delta_l_grid_um.empty()) {
    throw std::invalid_argument("scan_fringes: empty grid");
  }
  for (std::size_t i = 1; i < delta_l_grid_um.size(); ++i) {
    if (!(delta_l_grid_um[i] > delta_l_grid_um[i - 1])) {
      throw std::invalid_argument("scan_fringes: grid must be increasing");
    }
  }
  FringeScan scan;
  scan.lambda_p_um = scales.lambda_p_um();
  scan.rows.reserve(delta_l_grid_um.size());
  for (std::size_t i = 0; i < delta_l_grid_um.size(); ++i) {
    const auto setting = qm::ExperimentSetting::from_arm_imbalance(
        delta_l_grid_um[i], scales.lambda_p_um());
    mc::RunSpec point_spec = spec;
    point_spec.seed = derive_seed(spec.seed, i);
    FringeScanRow row;
    row.delta_l_um = delta_l_grid_um[i];
    row.counts = mc::run_batch(setting, point_spec, threads);
    row.quad_hat = estimate_quad(row.counts);
    row.quad_qm = qm::closed_form_probabilities(setting);
    scan.rows.push_back(row);
  }
  return scan;
}

namespace {

struct CosineModel {
  // f(x) = A + B cos(2 pi x / T + phase)
  static double eval(const Eigen::Vector4d& p, double x) {
    return p[0] + p[1] * std::cos(kTwoPi * x / p[2] + p[3]);
  }
  static Eigen::Vector4d jacobian_row(const Eigen::Vector4d& p, double x) {
    const double theta = kTwoPi * x / p[2] + p[3];
    const double s = std::sin(theta);
    Eigen::Vector4d j;
    j[0] = 1.0;
    j[1] = std::cos(theta);
    j[2] = p[1] * s * kTwoPi * x / (p[2] * p[2]);
    j[3] = -p[1] * s;
    return j;
  }
};

double cost_of(const Eigen::Vector4d& p, std::span<const double> x,
               std::span<const double> y) {
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - CosineModel::eval(p, x[i]);
    c += r * r;
  }
  return c;
}

}  // namespace

FringeFit fit_fringe(const FringeScan& scan, int channel) {
  if (channel < 1 || channel > 4) {
    throw std::invalid_argument("fit_fringe: channel must be 1..4");
  }
  const std::size_t n = scan.rows.size();
  if (n < 8) {
    throw std::invalid_argument("fit_fringe: need at least 8 points");
  }

  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = scan.rows[i].delta_l_um;
    y[i] = scan.rows[i].quad_hat[channel - 1].p_hat;
  }

  const double period0 = scan.lambda_p_um;
  if (x.back() - x.front() < 1.5 * period0) {
    throw std::invalid_argument(
        "fit_fringe: scan must span at least 1.5 periods");
  }

  // Initialization near the generating model.
  double mean = 0.0, lo = y[0], hi = y[0];
  for (double v : y) {
    mean += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  mean /= static_cast<double>(n);
  double fc = 0.0, fs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = kTwoPi * x[i] / period0;
    fc += (y[i] - mean) * std::cos(theta);
    fs += (y[i] - mean) * std::sin(theta);
  }

  Eigen::Vector4d p;
  p << mean, 0.5 * (hi - lo), period0, std::atan2(-fs, fc);

  double lambda = 1e-3;
  double cost = cost_of(p, x, y);
  int iterations = 0;
  bool converged = false;
  constexpr int kMaxIterations = 200;

  for (; iterations < kMaxIterations; ++iterations) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector4d j = CosineModel::jacobian_row(p, x[i]);
      const double r = y[i] - CosineModel::eval(p, x[i]);
      jtj += j * j.transpose();
      jtr += j * r;
    }

    bool stepped = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::Matrix4d damped = jtj;
      for (int k = 0; k < 4; ++k) {
        damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      }
      const Eigen::Vector4d step = damped.ldlt().solve(jtr);
      const Eigen::Vector4d candidate = p + step;
      if (!(candidate[2] > 0.0) || !candidate.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const double candidate_cost = cost_of(candidate, x, y);
      if (candidate_cost <= cost) {
        const double improvement = cost - candidate_cost;
        p = candidate;
        cost = candidate_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (step.cwiseAbs().maxCoeff() < 1e-12 ||
            improvement < 1e-20 * (cost + 1e-30)) {
          converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (converged) break;
    if (!stepped) {
      // No downhill step found at any damping: stationary point.
      converged = true;
      break;
    }
  }

  const double rms = std::sqrt(cost / static_cast<double>(n));
  if (!converged) {
    throw FitFailure("fit_fringe: no convergence after bounded iterations",
                     rms);
  }

  // Canonical form: positive amplitude, wrapped phase.
  if (p[1] < 0.0) {
    p[1] = -p[1];
    p[3] += kPi;
  }
  p[3] = wrap_phase(p[3]);

  // Linearized parameter covariance at the solution.
  Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector4d j = CosineModel::jacobian_row(p, x[i]);
    jtj += j * j.transpose();
  }
  const double dof = static_cast<double>(n) - 4.0;
  const double sigma2 = dof > 0.0 ? cost / dof : 0.0;
  const Eigen::Matrix4d cov =
      sigma2 * jtj.completeOrthogonalDecomposition().pseudoInverse();

  FringeFit fit;
  fit.offset = p[0];
  fit.amplitude = p[1];
  fit.period_um = p[2];
  fit.phase0 = p[3];
  fit.visibility = p[0] != 0.0 ? p[1] / p[0] : 0.0;
  fit.residual_rms = rms;
  fit.amplitude_stderr = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.iterations = iterations;
  return fit;
}

double max_deviation_from_linear(std::span<const double> dtilde_grid,
                                 std::span<const double> phi_grid,
                                 LinearComparator comparator) {
  if (dtilde_grid.empty() || phi_grid.empty()) {
    throw std::invalid_argument("max_deviation_from_linear: empty grid");
  }
  const double sign = comparator == LinearComparator::kMinus ? -1.0 : +1.0;
  double worst = 0.0;
  for (double dt : dtilde_grid) {
    const hidden::EffectivePhase dtilde(dt);
    for (double phi : phi_grid) {
      const double mapped =
          hidden::transform_phase(hidden::HiddenPhase(phi), dtilde).value();
      const double linear = wrap_phase(phi + sign * dtilde.value());
      worst = std::max(worst, circular_distance(mapped, linear));
    }
  }
  return worst;
}

TrendFit linear_trend(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("linear_trend: need >= 3 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("linear_trend: degenerate abscissa");
  }
  TrendFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

std::string format_g9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

void write_fringe_csv(const FringeScan& scan, std::ostream& os) {
  os << "delta_l_um,n_total,n1,n2,n3,n4,"
        "p1_hat,p2_hat,p3_hat,p4_hat,ci1,ci2,ci3,ci4,"
        "p1_qm,p2_qm,p3_qm,p4_qm\n";
  for (const auto& row : scan.rows) {
    os << format_g9(row.delta_l_um) << ',' << row.counts.n_total << ','
       << row.counts.n1 << ',' << row.counts.n2 << ',' << row.counts.n3 << ','
       << row.counts.n4;
    for (const auto& est : row.quad_hat) os << ',' << format_g9(est.p_hat);
    for (const auto& est : row.quad_hat) {
      os << ',' << format_g9(est.ci_half_width);
    }
    for (int c = 1; c <= 4; ++c) {
      os << ',' << format_g9(row.quad_qm.channel(c));
    }
    os << '\n';
  }
}

void write_histogram_csv(const timing::DifferenceHistogram& hist,
                         std::ostream& os) {
  os << "bin_center_ns,count\n";
  os << format_g9(-hist.arm_delay_ns) << ',' << hist.n_minus << '\n';
  os << format_g9(0.0) << ',' << hist.n_zero << '\n';
  os << format_g9(hist.arm_delay_ns) << ',' << hist.n_plus << '\n';
}

}  // namespace franson::analysis
