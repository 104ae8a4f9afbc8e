#pragma once

#include <array>
#include <complex>

#include "franson/phase.hpp"

namespace franson::qm {

/// Controllable phases of the two unbalanced interferometers. Only the
/// sum phi_a + phi_b is physical; the difference is a gauge degree of
/// freedom and is exposed nowhere downstream.
struct SettingPhases {
  double phi_a = 0.0;
  double phi_b = 0.0;
  double sum() const { return phi_a + phi_b; }
};

/// Exact four-outcome distribution (events #1..#4).
struct ProbabilityQuad {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;

  double sum() const { return p1 + p2 + p3 + p4; }
  double channel(int i) const;  // i in 1..4
};

/// The single physical knob of the experiment: the common arm imbalance
/// delta_l of both interferometers, at pump wavelength lambda_p. The
/// total phase S = 2*pi*delta_l/lambda_p and the fringe argument
/// delta = wrap(S - pi/2) are always recomputed, never stored.
class ExperimentSetting {
 public:
  ExperimentSetting(double delta_l_um, double lambda_p_um);

  static ExperimentSetting from_arm_imbalance(double delta_l_um,
                                              double lambda_p_um);

  double delta_l_um() const { return delta_l_um_; }
  double lambda_p_um() const { return lambda_p_um_; }
  double total_phase() const { return kTwoPi * delta_l_um_ / lambda_p_um_; }
  double delta() const { return wrap_phase(total_phase() - kPi / 2.0); }

 private:
  double delta_l_um_;
  double lambda_p_um_;
};

/// Product state of the photon pair in the basis
/// {xi1 xi1, xi1 xi2, xi2 xi1, xi2 xi2} (xi1 = short arm, xi2 = long arm).
class TwoPhotonState {
 public:
  explicit TwoPhotonState(std::array<std::complex<double>, 4> amplitudes);

  static TwoPhotonState franson_pair(const SettingPhases& phases);

  const std::array<std::complex<double>, 4>& amplitudes() const {
    return amplitudes_;
  }
  double norm_squared() const;

 private:
  std::array<std::complex<double>, 4> amplitudes_;
};

/// Closed-form outcome probabilities as a function of the total phase S:
/// (1/4)(1 + cos(S - pi/2)), (1/4)(1 - cos(S - pi/2)), 1/4, 1/4.
ProbabilityQuad closed_form_probabilities(double total_phase);
ProbabilityQuad closed_form_probabilities(const ExperimentSetting& setting);

/// Projects the state onto the four coincidence outcomes
/// |c1> = (|x1 x1> + i |x2 x2>)/sqrt(2), |c2> = (|x1 x1> - i |x2 x2>)/sqrt(2),
/// |c3> = |x1 x2>, |c4> = |x2 x1> and returns |<c_i|psi>|^2.
ProbabilityQuad outcome_probabilities(const TwoPhotonState& state);

/// State-vector route: builds the pair state for the given phases and
/// projects it. Independent oracle for closed_form_probabilities at
/// S = phi_a + phi_b.
ProbabilityQuad projected_probabilities(const SettingPhases& phases);

}  // namespace franson::qm
