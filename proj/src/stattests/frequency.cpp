#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "common.hpp"
#include "qrng/simd/bit_kernels.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {

void require_bits(BitView bits) {
  if (simd::max_value(bits) > 1) throw InputError("bit values must be 0 or 1");
}

Outcome frequency_monobit(BitView bits) {
  detail::require_length(bits, 1, "frequency_monobit");
  const double n = double(bits.size());
  const double ones = double(simd::count_ones(bits));
  const double s_n = 2.0 * ones - n;
  const double s_obs = std::abs(s_n) / std::sqrt(n);
  return {s_obs, erfc(s_obs / std::numbers::sqrt2)};
}

Outcome block_frequency(BitView bits, std::size_t block_len) {
  if (block_len < 2) throw ParameterError("block_frequency: block length must be at least 2");
  detail::require_length(bits, block_len, "block_frequency");
  const std::size_t blocks = bits.size() / block_len;
  double chi2 = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const double pi = double(simd::count_ones(bits.subspan(b * block_len, block_len))) / double(block_len);
    chi2 += (pi - 0.5) * (pi - 0.5);
  }
  chi2 *= 4.0 * double(block_len);
  return {chi2, igamc(double(blocks) / 2.0, chi2 / 2.0)};
}

Outcome cumulative_sums(BitView bits, CusumMode mode) {
  detail::require_length(bits, 1, "cumulative_sums");
  const std::size_t n = bits.size();
  long long s = 0;
  long long z = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = mode == CusumMode::forward ? k : n - 1 - k;
    s += bits[i] ? 1 : -1;
    z = std::max(z, std::llabs(s));
  }

  const double nd = double(n);
  const double zd = double(z);
  const double sqrt_n = std::sqrt(nd);
  // Summation bounds truncate toward zero, as in the reference code.
  double sum1 = 0.0;
  for (int k = int((-nd / zd + 1.0) / 4.0); k <= int((nd / zd - 1.0) / 4.0); ++k)
    sum1 += normal_cdf((4.0 * k + 1.0) * zd / sqrt_n) - normal_cdf((4.0 * k - 1.0) * zd / sqrt_n);
  double sum2 = 0.0;
  for (int k = int((-nd / zd - 3.0) / 4.0); k <= int((nd / zd - 1.0) / 4.0); ++k)
    sum2 += normal_cdf((4.0 * k + 3.0) * zd / sqrt_n) - normal_cdf((4.0 * k + 1.0) * zd / sqrt_n);
  const double p = 1.0 - sum1 + sum2;
  return {zd, std::clamp(p, 0.0, 1.0)};
}

}  // namespace qrng::stattests
