#include "qrng/special_functions.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "qrng/error.hpp"

namespace qrng {

double erfc(double x) { return std::erfc(x); }

double igamc(double a, double x) {
  if (!(a > 0.0)) throw ParameterError("igamc: a must be positive");
  if (!(x >= 0.0)) throw ParameterError("igamc: x must be non-negative");
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(a, x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace qrng
