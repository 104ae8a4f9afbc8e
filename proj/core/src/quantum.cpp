#include "franson/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace franson::qm {

namespace {
constexpr double kNormTolerance = 1e-12;
}

double ProbabilityQuad::channel(int i) const {
  switch (i) {
    case 1: return p1;
    case 2: return p2;
    case 3: return p3;
    case 4: return p4;
    default: throw std::invalid_argument("ProbabilityQuad: channel must be 1..4");
  }
}

ExperimentSetting::ExperimentSetting(double delta_l_um, double lambda_p_um)
    : delta_l_um_(delta_l_um), lambda_p_um_(lambda_p_um) {
  if (!(lambda_p_um > 0.0)) {
    throw std::invalid_argument("ExperimentSetting: lambda_p must be > 0");
  }
  if (!std::isfinite(delta_l_um)) {
    throw std::invalid_argument("ExperimentSetting: delta_l must be finite");
  }
}

ExperimentSetting ExperimentSetting::from_arm_imbalance(double delta_l_um,
                                                        double lambda_p_um) {
  if (delta_l_um < 0.0) {
    throw std::invalid_argument("from_arm_imbalance: delta_l must be >= 0");
  }
  return ExperimentSetting(delta_l_um, lambda_p_um);
}

TwoPhotonState::TwoPhotonState(std::array<std::complex<double>, 4> amplitudes)
    : amplitudes_(amplitudes) {
  if (std::abs(norm_squared() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("TwoPhotonState: amplitudes are not normalized");
  }
}

TwoPhotonState TwoPhotonState::franson_pair(const SettingPhases& phases) {
  // (|x1> + e^{i phi_A} |x2>)/sqrt(2) (x) (|x1> + e^{i phi_B} |x2>)/sqrt(2)
  const std::complex<double> ea = std::polar(1.0, phases.phi_a);
  const std::complex<double> eb = std::polar(1.0, phases.phi_b);
  return TwoPhotonState({0.5 * std::complex<double>{1.0, 0.0}, 0.5 * eb,
                         0.5 * ea, 0.5 * ea * eb});
}

double TwoPhotonState::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amplitudes_) n += std::norm(a);
  return n;
}

ProbabilityQuad closed_form_probabilities(double total_phase) {
  const double c = std::cos(total_phase - kPi / 2.0);
  return {0.25 * (1.0 + c), 0.25 * (1.0 - c), 0.25, 0.25};
}

ProbabilityQuad closed_form_probabilities(const ExperimentSetting& setting) {
  return closed_form_probabilities(setting.total_phase());
}

ProbabilityQuad outcome_probabilities(const TwoPhotonState& state) {
  const auto& a = state.amplitudes();
  const std::complex<double> i{0.0, 1.0};
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // <c1| = (<x1 x1| - i <x2 x2|)/sqrt(2), <c2| = (<x1 x1| + i <x2 x2|)/sqrt(2)
  const std::complex<double> c1 = (a[0] - i * a[3]) * inv_sqrt2;
  const std::complex<double> c2 = (a[0] + i * a[3]) * inv_sqrt2;
  return {std::norm(c1), std::norm(c2), std::norm(a[1]), std::norm(a[2])};
}

ProbabilityQuad projected_probabilities(const SettingPhases& phases) {
  return outcome_probabilities(TwoPhotonState::franson_pair(phases));
}

}  // namespace franson::qm
