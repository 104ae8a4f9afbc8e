#include "franson/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "franson/analysis.hpp"
#include "franson/hidden_transform.hpp"
#include "franson/montecarlo.hpp"
#include "franson/phase.hpp"
#include "franson/quantum.hpp"
#include "franson/rng.hpp"
#include "franson/timing.hpp"

namespace franson::verify {

namespace {

// Offset uniform grid over [-pi, pi): midpoints of n equal cells, which
// keeps every point away from the seams at -pi and 0 where the density
// vanishes and arc-cos arguments touch +-1.
std::vector<double> offset_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = -kPi + (static_cast<double>(i) + 0.5) * kTwoPi / static_cast<double>(n);
  }
  return grid;
}

void add_check(Report& report, std::string name, double observed,
               double bound) {
  report.checks.push_back(
      {std::move(name), observed, bound, observed <= bound});
}

// Composite Simpson quadrature of the hidden-phase density, integrated
// separately on each smooth half of the support.
double density_quadrature(double lo, double hi, std::size_t panels) {
  const double h = (hi - lo) / static_cast<double>(panels);
  double sum = hidden::phase_density(hidden::HiddenPhase(lo)) +
               hidden::phase_density(hidden::HiddenPhase(hi));
  for (std::size_t i = 1; i < panels; ++i) {
    const double x = lo + static_cast<double>(i) * h;
    sum += (i % 2 == 1 ? 4.0 : 2.0) *
           hidden::phase_density(hidden::HiddenPhase(x));
  }
  return sum * h / 3.0;
}

int sign_of(double x) { return x < 0.0 ? -1 : +1; }

Report run_oracle(std::uint64_t seed) {
  Report report{"oracle", {}};
  constexpr std::size_t kPairs = 10'000;
  const CounterRng rng(seed, 0);

  double max_equiv = 0.0;
  double max_gauge = 0.0;
  double max_norm = 0.0;
  double max_flat = 0.0;
  for (std::size_t i = 0; i < kPairs; ++i) {
    const std::uint64_t base = 3 * static_cast<std::uint64_t>(i);
    const double phi_a = -kPi + kTwoPi * rng.uniform(base);
    const double phi_b = -kPi + kTwoPi * rng.uniform(base + 1);
    const double x = -kPi + kTwoPi * rng.uniform(base + 2);

    const qm::ProbabilityQuad closed =
        qm::closed_form_probabilities(phi_a + phi_b);
    const qm::ProbabilityQuad projected =
        qm::projected_probabilities({phi_a, phi_b});
    const qm::ProbabilityQuad shifted =
        qm::projected_probabilities({phi_a + x, phi_b - x});
    for (int c = 1; c <= 4; ++c) {
      max_equiv =
          std::max(max_equiv, std::abs(projected.channel(c) - closed.channel(c)));
      max_gauge =
          std::max(max_gauge, std::abs(shifted.channel(c) - projected.channel(c)));
    }
    max_norm = std::max({max_norm, std::abs(closed.sum() - 1.0),
                         std::abs(projected.sum() - 1.0)});
    max_flat = std::max({max_flat, std::abs(projected.p3 - 0.25),
                         std::abs(projected.p4 - 0.25)});
  }
  add_check(report, "oracle/closed_vs_projection_max_diff", max_equiv, 1e-12);
  add_check(report, "oracle/gauge_shift_max_diff", max_gauge, 1e-12);
  add_check(report, "oracle/normalization_max_dev", max_norm, 1e-12);
  add_check(report, "oracle/p3_p4_quarter_max_dev", max_flat, 1e-12);

  // p1 + p2 = 1/2 and p1(Delta) = p2(Delta +- pi), checked in closed form
  // on a fine grid of Delta.
  double max_sym = 0.0;
  for (double delta : offset_grid(1000)) {
    const double s = delta + kPi / 2.0;
    const qm::ProbabilityQuad at = qm::closed_form_probabilities(s);
    const qm::ProbabilityQuad opposite =
        qm::closed_form_probabilities(s + kPi);
    max_sym = std::max({max_sym, std::abs(at.p1 + at.p2 - 0.5),
                        std::abs(at.p1 - opposite.p2)});
  }
  add_check(report, "oracle/fringe_symmetry_max_dev", max_sym, 1e-12);
  return report;
}

Report run_density(std::uint64_t seed) {
  Report report{"density", {}};

  constexpr std::size_t kPanels = 10'000;
  const double mass =
      density_quadrature(-kPi, 0.0, kPanels) + density_quadrature(0.0, kPi, kPanels);
  add_check(report, "density/quadrature_normalization_dev",
            std::abs(mass - 1.0), 1e-9);

  double max_cdf_dev = 0.0;
  for (double phi : offset_grid(64)) {
    double quad = phi < 0.0 ? density_quadrature(-kPi, phi, kPanels)
                            : 0.5 + density_quadrature(0.0, phi, kPanels);
    max_cdf_dev = std::max(max_cdf_dev, std::abs(quad - hidden::phase_cdf(phi)));
  }
  add_check(report, "density/cdf_vs_quadrature_max_dev", max_cdf_dev, 1e-9);

  constexpr std::size_t kSamples = 1'000'000;
  const CounterRng rng(seed, 1);
  std::vector<double> samples(kSamples);
  std::uint64_t out_of_range = 0;
  for (std::size_t i = 0; i < kSamples; ++i) {
    const double phi = hidden::sample_phase(rng.uniform(i)).value();
    samples[i] = phi;
    if (!(phi >= -kPi && phi < kPi)) ++out_of_range;
  }
  add_check(report, "density/sampler_range_violations",
            static_cast<double>(out_of_range), 0.0);
  add_check(report, "density/sampler_ks",
            analysis::ks_statistic(std::move(samples), hidden::phase_cdf),
            analysis::ks_bound(kSamples));
  return report;
}

Report run_transform(std::uint64_t seed) {
  Report report{"transform", {}};

  constexpr std::size_t kRandomPairs = 1'000'000;
  const CounterRng rng(seed, 2);
  std::uint64_t closure_violations = 0;
  for (std::size_t i = 0; i < kRandomPairs; ++i) {
    const double phi = -kPi + kTwoPi * rng.uniform(2 * i);
    const double dtilde = -kPi + kTwoPi * rng.uniform(2 * i + 1);
    try {
      const double image =
          hidden::transform_phase(hidden::HiddenPhase(phi),
                                  hidden::EffectivePhase(dtilde))
              .value();
      if (!(image >= -kPi && image < kPi)) ++closure_violations;
    } catch (const std::logic_error&) {
      ++closure_violations;
    }
  }
  add_check(report, "transform/range_closure_violations",
            static_cast<double>(closure_violations), 0.0);

  double max_fixed = 0.0;
  for (double dtilde : offset_grid(1000)) {
    max_fixed = std::max(
        max_fixed, std::abs(hidden::transform_phase(
                                hidden::HiddenPhase(dtilde),
                                hidden::EffectivePhase(dtilde))
                                .value()));
  }
  add_check(report, "transform/fixed_point_max_abs", max_fixed, 0.0);

  // Identity at dtilde = 0, away from the seams at 0 and -pi where the
  // arc-cos round trip amplifies rounding by 1/|sin phi|.
  double max_identity = 0.0;
  for (double phi : offset_grid(10'000)) {
    if (std::abs(phi) < 1e-3 || kPi - std::abs(phi) < 1e-3) continue;
    const double image = hidden::transform_phase(hidden::HiddenPhase(phi),
                                                 hidden::EffectivePhase(0.0))
                             .value();
    max_identity = std::max(max_identity, std::abs(image - phi));
  }
  add_check(report, "transform/identity_max_dev", max_identity, 1e-12);

  // Sign structure: negative just below the fixed point, positive just
  // above; the reverse across the antipode dtilde - pi. A sweep over an
  // offset grid must see exactly those two sign changes.
  constexpr double kEps = 1e-6;
  std::uint64_t sign_violations = 0;
  const std::vector<double> sweep = offset_grid(4096);
  for (double dtilde : offset_grid(50)) {
    const hidden::EffectivePhase dt(dtilde);
    const auto image = [&](double phi) {
      return hidden::transform_phase(hidden::HiddenPhase(wrap_phase(phi)), dt)
          .value();
    };
    if (sign_of(image(dtilde - kEps)) != -1) ++sign_violations;
    if (sign_of(image(dtilde + kEps)) != +1) ++sign_violations;
    const double antipode = wrap_phase(dtilde - kPi);
    if (sign_of(image(antipode - kEps)) != +1) ++sign_violations;
    if (sign_of(image(antipode + kEps)) != -1) ++sign_violations;

    int transitions = 0;
    int prev = sign_of(image(sweep.front()));
    for (std::size_t i = 1; i < sweep.size(); ++i) {
      const int cur = sign_of(image(sweep[i]));
      if (cur != prev) ++transitions;
      prev = cur;
    }
    if (transitions != 2) ++sign_violations;
  }
  add_check(report, "transform/sign_structure_violations",
            static_cast<double>(sign_violations), 0.0);

  // Strict monotonicity on each branch interval.
  std::uint64_t monotonicity_violations = 0;
  for (double dtilde : offset_grid(20)) {
    const hidden::EffectivePhase dt(dtilde);
    const double edges[] = {-kPi, std::min(wrap_phase(dtilde - kPi), dtilde),
                            0.0, std::max(wrap_phase(dtilde - kPi), dtilde),
                            kPi};
    for (int b = 0; b < 4; ++b) {
      const double lo = edges[b];
      const double hi = edges[b + 1];
      if (hi - lo < 1e-6) continue;
      double prev = 0.0;
      for (std::size_t i = 0; i < 1000; ++i) {
        const double phi =
            lo + (static_cast<double>(i) + 0.5) / 1000.0 * (hi - lo);
        const double image =
            hidden::transform_phase(hidden::HiddenPhase(phi), dt).value();
        if (i > 0 && !(image > prev)) ++monotonicity_violations;
        prev = image;
      }
    }
  }
  add_check(report, "transform/branch_monotonicity_violations",
            static_cast<double>(monotonicity_violations), 0.0);
  return report;
}

Report run_measure(std::uint64_t seed) {
  Report report{"measure", {}};

  // Jacobian residual |g(L(phi)) |L'(phi)| - g(phi)| on interior points,
  // excluding a radius where the central difference straddles a seam.
  constexpr double kExclusionRadius = 1e-3;
  double max_residual = 0.0;
  for (double dtilde : offset_grid(20)) {
    const hidden::EffectivePhase dt(dtilde);
    const double breakpoints[] = {dtilde, wrap_phase(dtilde - kPi), 0.0, -kPi};
    for (double phi : offset_grid(1000)) {
      const bool near_seam =
          std::any_of(std::begin(breakpoints), std::end(breakpoints),
                      [&](double b) {
                        return circular_distance(phi, b) <= kExclusionRadius;
                      });
      if (near_seam) continue;
      max_residual = std::max(
          max_residual,
          hidden::pushforward_residual(hidden::HiddenPhase(phi), dt));
    }
  }
  add_check(report, "measure/jacobian_residual_max", max_residual, 1e-6);

  constexpr std::size_t kSamples = 1'000'000;
  double max_ks = 0.0;
  std::uint64_t stream = 3;
  for (double dtilde : offset_grid(5)) {
    const hidden::EffectivePhase dt(dtilde);
    const CounterRng rng(seed, stream++);
    std::vector<double> images(kSamples);
    for (std::size_t i = 0; i < kSamples; ++i) {
      const hidden::HiddenPhase phi_a = hidden::sample_phase(rng.uniform(i));
      images[i] = hidden::transform_phase(phi_a, dt).value();
    }
    max_ks = std::max(
        max_ks, analysis::ks_statistic(std::move(images), hidden::phase_cdf));
  }
  add_check(report, "measure/pushforward_ks_max", max_ks,
            analysis::ks_bound(kSamples));
  return report;
}

Report run_timing(std::uint64_t seed, unsigned threads) {
  Report report{"timing", {}};
  const timing::TimingScales scales = timing::default_scales();
  const double window = scales.arm_delay_ns() / 4.0;

  constexpr std::uint64_t kTrials = 1'000'000;
  const timing::DifferenceHistogram hist =
      timing::time_difference_histogram(kTrials, scales, window, seed, threads);
  const double n = static_cast<double>(hist.n_total);
  const double sigma_side = std::sqrt(0.25 * 0.75 / n);
  const double sigma_zero = std::sqrt(0.5 * 0.5 / n);
  add_check(report, "timing/mass_minus_dev",
            std::abs(static_cast<double>(hist.n_minus) / n - 0.25),
            4.0 * sigma_side);
  add_check(report, "timing/mass_zero_dev",
            std::abs(static_cast<double>(hist.n_zero) / n - 0.5),
            4.0 * sigma_zero);
  add_check(report, "timing/mass_plus_dev",
            std::abs(static_cast<double>(hist.n_plus) / n - 0.25),
            4.0 * sigma_side);
  add_check(report, "timing/outside_window_count",
            static_cast<double>(hist.n_outside), 0.0);
  add_check(report, "timing/verdict_disagreement_rate",
            static_cast<double>(hist.n_total - hist.n_verdict_agree) / n,
            1e-6);

  // With the jitter switched off the window verdict must reproduce the
  // slot classification exactly.
  const timing::TimingScales no_jitter(scales.pulse_width_ns(),
                                       scales.arm_delay_ns(), 0.0,
                                       scales.lambda_p_um());
  const timing::DifferenceHistogram exact = timing::time_difference_histogram(
      100'000, no_jitter, window, seed + 1, threads);
  add_check(report, "timing/tau_zero_disagreements",
            static_cast<double>(exact.n_total - exact.n_verdict_agree), 0.0);
  add_check(report, "timing/tau_zero_outside_count",
            static_cast<double>(exact.n_outside), 0.0);
  return report;
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.pass; });
}

std::optional<Suite> parse_suite(std::string_view name) {
  if (name == "density") return Suite::kDensity;
  if (name == "transform") return Suite::kTransform;
  if (name == "measure") return Suite::kMeasure;
  if (name == "oracle") return Suite::kOracle;
  if (name == "timing") return Suite::kTiming;
  if (name == "all") return Suite::kAll;
  return std::nullopt;
}

std::string suite_name(Suite suite) {
  switch (suite) {
    case Suite::kDensity: return "density";
    case Suite::kTransform: return "transform";
    case Suite::kMeasure: return "measure";
    case Suite::kOracle: return "oracle";
    case Suite::kTiming: return "timing";
    case Suite::kAll: return "all";
  }
  return "unknown";
}

Report run_suite(Suite suite, std::uint64_t seed, unsigned threads) {
  switch (suite) {
    case Suite::kDensity: return run_density(seed);
    case Suite::kTransform: return run_transform(seed);
    case Suite::kMeasure: return run_measure(seed);
    case Suite::kOracle: return run_oracle(seed);
    case Suite::kTiming: return run_timing(seed, threads);
    case Suite::kAll: {
      Report all{"all", {}};
      for (Suite s : {Suite::kOracle, Suite::kDensity, Suite::kTransform,
                      Suite::kMeasure, Suite::kTiming}) {
        Report part = run_suite(s, seed, threads);
        all.checks.insert(all.checks.end(),
                          std::make_move_iterator(part.checks.begin()),
                          std::make_move_iterator(part.checks.end()));
      }
      return all;
    }
  }
  throw std::invalid_argument("run_suite: unknown suite");
}

}  // namespace franson::verify
