#include "franson/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <stdexcept>

namespace franson {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
  }
  static const boost::math::normal_distribution<double> unit{};
  return boost::math::quantile(unit, p);
}

}  // namespace franson
