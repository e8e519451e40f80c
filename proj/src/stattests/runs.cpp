#include <array>
#include <cmath>
#include <numbers>

#include "common.hpp"
#include "qrng/simd/bit_kernels.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {

Outcome runs(BitView bits) {
  detail::require_length(bits, 1, "runs");
  const double n = double(bits.size());
  const double pi = double(simd::count_ones(bits)) / n;
  const double v_obs = 1.0 + double(simd::count_transitions(bits));
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return {v_obs, 0.0};
  const double num = std::abs(v_obs - 2.0 * n * pi * (1.0 - pi));
  const double den = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
  return {v_obs, erfc(num / den)};
}

namespace {

struct LongestRunRegime {
  std::size_t block_len;
  unsigned lowest;  // runs <= lowest share the first class
  std::vector<double> probs;
};

const LongestRunRegime& regime_for(std::size_t n) {
  static const LongestRunRegime small{8, 1, {0.2148, 0.3672, 0.2305, 0.1875}};
  static const LongestRunRegime medium{128, 4, {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124}};
  static const LongestRunRegime large{10000, 10, {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727}};
  if (n >= 750000) return large;
  if (n >= 6272) return medium;
  return small;
}

}  // namespace

Outcome longest_run_of_ones(BitView bits) {
  detail::require_length(bits, 128, "longest_run_of_ones");
  const LongestRunRegime& r = regime_for(bits.size());
  const std::size_t blocks = bits.size() / r.block_len;
  const std::size_t classes = r.probs.size();
  std::vector<std::size_t> counts(classes, 0);

  for (std::size_t b = 0; b < blocks; ++b) {
    unsigned run = 0;
    unsigned longest = 0;
    for (std::size_t i = b * r.block_len; i < (b + 1) * r.block_len; ++i) {
      run = bits[i] ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    std::size_t cls = longest <= r.lowest ? 0 : longest - r.lowest;
    counts[std::min(cls, classes - 1)]++;
  }
  const double chi2 = detail::chi_squared(counts, r.probs, double(blocks));
  return {chi2, igamc(double(classes - 1) / 2.0, chi2 / 2.0)};
}

}  // namespace qrng::stattests
