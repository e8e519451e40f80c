#pragma once

#include <string>

#include "qrng/stattests.hpp"

namespace qrng::stattests::detail {

inline void require_length(BitView bits, std::size_t minimum, const char* test) {
  require_bits(bits);
  if (bits.size() < minimum)
    throw InsufficientDataError(std::string(test) + " needs at least " + std::to_string(minimum) +
                                " bits, got " + std::to_string(bits.size()));
}

// χ² goodness of fit: Σ (observed - n p)^2 / (n p).
template <typename Counts, typename Probs>
double chi_squared(const Counts& observed, const Probs& probs, double n) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < std::size(probs); ++i) {
    const double expected = n * probs[i];
    const double d = double(observed[i]) - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

}  // namespace qrng::stattests::detail
