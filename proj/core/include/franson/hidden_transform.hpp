#pragma once

#include <cstdint>

#include "franson/phase.hpp"

namespace franson::hidden {

/// Hidden angular coordinate on the unit circle, kept in [-pi, pi).
class HiddenPhase {
 public:
  explicit HiddenPhase(double radians) : value_(wrap_phase(radians)) {}
  double value() const { return value_; }

 private:
  double value_;
};

/// Phase argument of the exit-B coordinate transformation, in [-pi, pi).
class EffectivePhase {
 public:
  explicit EffectivePhase(double radians) : value_(wrap_phase(radians)) {}
  double value() const { return value_; }

 private:
  double value_;
};

/// Binary pair selecting the early/late detection slot of each photon.
/// The four values are equiprobable.
struct Shape {
  std::int8_t eta_a = -1;
  std::int8_t eta_b = -1;
};

/// Probability density of the hidden phase, (1/4)|sin(phi)|.
double phase_density(HiddenPhase phi);

/// CDF of phase_density on [-pi, pi): (1 + cos(phi))/4 below zero,
/// 1/2 + (1 - cos(phi))/4 above.
double phase_cdf(double phi);

/// Inverse-CDF draw from phase_density; u must lie in [0, 1).
HiddenPhase sample_phase(double u);

/// Branch sign q = sign(wrap(phi - dtilde)); sign(0) is +1.
int branch_sign(HiddenPhase phi, EffectivePhase dtilde);

/// Phase argument of the transformation for one shape realization:
/// eta_a * delta when the slots agree, -eta_a * pi/2 when they differ.
EffectivePhase effective_phase(Shape shape, double delta);

/// Piecewise coordinate transformation mapping the hidden phase at exit A
/// to the phase at exit B. Measure-preserving with respect to
/// phase_density; fixes transform_phase(dtilde, dtilde) = 0 and reduces
/// to the identity at dtilde = 0.
HiddenPhase transform_phase(HiddenPhase phi, EffectivePhase dtilde);

/// |g(L(phi)) * |L'(phi)| - g(phi)| with L' estimated by a central
/// difference of step h. Requires phi to be further than 10*h from the
/// branch breakpoints {dtilde - pi, 0, dtilde} and from the -pi seam;
/// throws std::domain_error otherwise.
double pushforward_residual(HiddenPhase phi, EffectivePhase dtilde,
                            double h = 1e-6);

}  // namespace franson::hidden
