#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "common.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {
namespace {

struct UniversalParams {
  std::size_t min_n;
  unsigned L;
  double expected;
  double variance;
};

// Block length by input size, with the reference mean and variance of the
// per-block log-distance statistic.
constexpr std::array<UniversalParams, 11> kTable{{
    {387840, 6, 5.2177052, 2.954},
    {904960, 7, 6.1962507, 3.125},
    {2068480, 8, 7.1836656, 3.238},
    {4654080, 9, 8.1764248, 3.311},
    {10342400, 10, 9.1723243, 3.356},
    {22753280, 11, 10.170032, 3.384},
    {49643520, 12, 11.168765, 3.401},
    {107560960, 13, 12.168070, 3.410},
    {231669760, 14, 13.167693, 3.416},
    {496435200, 15, 14.167488, 3.419},
    {1059061760, 16, 15.167379, 3.421},
}};

}  // namespace

Outcome universal(BitView bits) {
  detail::require_length(bits, kTable.front().min_n, "universal");
  const std::size_t n = bits.size();
  UniversalParams p = kTable.front();
  for (const auto& row : kTable)
    if (n >= row.min_n) p = row;

  const std::size_t L = p.L;
  const std::size_t Q = 10 * (std::size_t{1} << L);
  const std::size_t K = n / L - Q;

  auto block_value = [&](std::size_t i) {
    std::uint32_t v = 0;
    for (std::size_t j = 0; j < L; ++j) v = (v << 1) | bits[i * L + j];
    return v;
  };

  std::vector<std::size_t> last_seen(std::size_t{1} << L, 0);
  for (std::size_t i = 1; i <= Q; ++i) last_seen[block_value(i - 1)] = i;
  double sum = 0.0;
  for (std::size_t i = Q + 1; i <= Q + K; ++i) {
    const std::uint32_t v = block_value(i - 1);
    sum += std::log2(double(i - last_seen[v]));
    last_seen[v] = i;
  }

  const double fn = sum / double(K);
  const double Ld = double(L);
  const double c = 0.7 - 0.8 / Ld + (4.0 + 32.0 / Ld) * std::pow(double(K), -3.0 / Ld) / 15.0;
  const double sigma = c * std::sqrt(p.variance / double(K));
  return {fn, erfc(std::abs(fn - p.expected) / (std::numbers::sqrt2 * sigma))};
}

}  // namespace qrng::stattests
