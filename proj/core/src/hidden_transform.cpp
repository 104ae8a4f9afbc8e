#include "franson/hidden_transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace franson::hidden {

namespace {
// Arc-cosine arguments may drift past +-1 by rounding; anything further
// out than this window is a branch-selection bug, not noise.
constexpr double kArccosClampWindow = 1e-12;
}  // namespace

double phase_density(HiddenPhase phi) {
  return 0.25 * std::abs(std::sin(phi.value()));
}

double phase_cdf(double phi) {
  if (phi <= -kPi) return 0.0;
  if (phi >= kPi) return 1.0;
  if (phi < 0.0) return 0.25 * (1.0 + std::cos(phi));
  return 0.5 + 0.25 * (1.0 - std::cos(phi));
}

HiddenPhase sample_phase(double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::invalid_argument("sample_phase: u must be in [0, 1)");
  }
  if (u < 0.5) {
    return HiddenPhase(-std::acos(std::clamp(4.0 * u - 1.0, -1.0, 1.0)));
  }
  return HiddenPhase(std::acos(std::clamp(3.0 - 4.0 * u, -1.0, 1.0)));
}

int branch_sign(HiddenPhase phi, EffectivePhase dtilde) {
  return wrap_phase(phi.value() - dtilde.value()) < 0.0 ? -1 : +1;
}

EffectivePhase effective_phase(Shape shape, double delta) {
  if (shape.eta_a == shape.eta_b) {
    return EffectivePhase(shape.eta_a * delta);
  }
  return EffectivePhase(-shape.eta_a * (kPi / 2.0));
}

HiddenPhase transform_phase(HiddenPhase phi_in, EffectivePhase dtilde_in) {
  const double phi = phi_in.value();
  const double dt = dtilde_in.value();
  // At dtilde = 0 both surviving branches reduce to q * arccos(cos phi),
  // which is phi exactly; return it directly rather than paying the
  // arc-cosine round-trip noise of ~ulp/|sin phi| near the seams.
  if (dt == 0.0) return phi_in;
  const double cd = std::cos(dt);
  const double cp = std::cos(phi);

  double arg;
  if (dt >= 0.0) {
    if (phi < dt - kPi) {
      arg = -cd - cp - 1.0;
    } else if (phi < 0.0) {
      arg = +cd + cp - 1.0;
    } else if (phi < dt) {
      arg = +cd - cp + 1.0;
    } else {
      arg = -cd + cp + 1.0;
    }
  } else {
    if (phi < dt) {
      arg = -cd + cp + 1.0;
    } else if (phi < 0.0) {
      arg = +cd - cp + 1.0;
    } else if (phi < dt + kPi) {
      arg = +cd + cp - 1.0;
    } else {
      arg = -cd - cp - 1.0;
    }
  }

  if (arg < -1.0 - kArccosClampWindow || arg > 1.0 + kArccosClampWindow) {
    throw std::logic_error("transform_phase: arc-cos argument " +
                           std::to_string(arg) +
                           " outside the clamp window; branch selection bug");
  }
  const double magnitude = std::acos(std::clamp(arg, -1.0, 1.0));
  const int q = branch_sign(phi_in, dtilde_in);
  return HiddenPhase(q < 0 ? -magnitude : magnitude);
}

double pushforward_residual(HiddenPhase phi, EffectivePhase dtilde, double h) {
  const double phi_v = phi.value();
  const double dt = dtilde.value();
  const double breakpoints[] = {dt, wrap_phase(dt - kPi), 0.0, -kPi};
  for (double b : breakpoints) {
    if (circular_distance(phi_v, b) <= 10.0 * h) {
      throw std::domain_error(
          "pushforward_residual: phi too close to a branch boundary");
    }
  }
  const double lp = transform_phase(HiddenPhase(phi_v + h), dtilde).value();
  const double lm = transform_phase(HiddenPhase(phi_v - h), dtilde).value();
  const double deriv = wrap_phase(lp - lm) / (2.0 * h);
  const double image_density = phase_density(transform_phase(phi, dtilde));
  return std::abs(image_density * std::abs(deriv) - phase_density(phi));
}

}  // namespace franson::hidden
