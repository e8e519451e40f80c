#include <array>
#include <cmath>
#include <vector>

#include "common.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {

std::size_t berlekamp_massey(BitView s) {
  const std::size_t n = s.size();
  std::vector<std::uint8_t> c(n + 1, 0), b(n + 1, 0), t;
  c[0] = b[0] = 1;
  std::size_t L = 0;
  std::ptrdiff_t m = -1;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t d = s[i];
    for (std::size_t j = 1; j <= L; ++j) d ^= c[j] & s[i - j];
    if (!d) continue;
    t = c;
    const std::size_t shift = i - static_cast<std::size_t>(m);
    for (std::size_t j = 0; j + shift <= n; ++j) c[j + shift] ^= b[j];
    if (2 * L <= i) {
      L = i + 1 - L;
      m = static_cast<std::ptrdiff_t>(i);
      b = t;
    }
  }
  return L;
}

Outcome linear_complexity(BitView bits, std::size_t block_len) {
  if (block_len < 20) throw ParameterError("linear_complexity: block length must be at least 20");
  detail::require_length(bits, 200 * block_len, "linear_complexity");
  constexpr std::array<double, 7> kProbs{1.0 / 96, 1.0 / 32, 1.0 / 8, 1.0 / 2, 1.0 / 4, 1.0 / 16, 1.0 / 48};

  const double M = double(block_len);
  const double sign = (block_len % 2 == 0) ? 1.0 : -1.0;  // (-1)^M
  const double mu = M / 2.0 + (9.0 - sign) / 36.0 - (M / 3.0 + 2.0 / 9.0) / std::pow(2.0, M);

  const std::size_t blocks = bits.size() / block_len;
  std::array<std::size_t, 7> counts{};
  for (std::size_t k = 0; k < blocks; ++k) {
    const double L = double(berlekamp_massey(bits.subspan(k * block_len, block_len)));
    const double T = sign * (L - mu) + 2.0 / 9.0;
    std::size_t cls;
    if (T <= -2.5) cls = 0;
    else if (T <= -1.5) cls = 1;
    else if (T <= -0.5) cls = 2;
    else if (T <= 0.5) cls = 3;
    else if (T <= 1.5) cls = 4;
    else if (T <= 2.5) cls = 5;
    else cls = 6;
    ++counts[cls];
  }
  const double chi2 = detail::chi_squared(counts, kProbs, double(blocks));
  return {chi2, igamc(3.0, chi2 / 2.0)};
}

}  // namespace qrng::stattests
