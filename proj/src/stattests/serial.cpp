#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "common.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {
namespace {

// Frequencies of all overlapping m-bit patterns, the sequence wrapped
// around by m - 1 bits.
std::vector<std::uint64_t> cyclic_pattern_counts(BitView bits, unsigned m) {
  const std::size_t n = bits.size();
  const std::uint32_t mask = (m == 32) ? 0xFFFFFFFFu : ((1u << m) - 1u);
  std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
  std::uint32_t pattern = 0;
  for (unsigned i = 0; i + 1 < m; ++i) pattern = (pattern << 1) | bits[i % n];
  for (std::size_t i = m - 1; i < n + m - 1; ++i) {
    pattern = ((pattern << 1) | bits[i < n ? i : i - n]) & mask;
    ++counts[pattern];
  }
  return counts;
}

// Counts for m - 1 from counts for m: the first m - 1 bits of each cyclic
// m-window are the (m - 1)-window at the same start.
std::vector<std::uint64_t> marginalize(const std::vector<std::uint64_t>& counts) {
  std::vector<std::uint64_t> out(counts.size() / 2);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = counts[2 * p] + counts[2 * p + 1];
  return out;
}

double psi_squared(const std::vector<std::uint64_t>& counts, double n) {
  if (counts.size() <= 1) return 0.0;
  double sum = 0.0;
  for (std::uint64_t c : counts) sum += double(c) * double(c);
  return double(counts.size()) / n * sum - n;
}

double phi(const std::vector<std::uint64_t>& counts, double n) {
  double sum = 0.0;
  for (std::uint64_t c : counts)
    if (c > 0) sum += double(c) / n * std::log(double(c) / n);
  return sum;
}

}  // namespace

std::array<Outcome, 2> serial(BitView bits, unsigned m) {
  if (m < 2 || m > 24) throw ParameterError("serial: m must lie in [2, 24]");
  detail::require_length(bits, std::size_t{1} << m, "serial");
  const double n = double(bits.size());

  const auto c_m = cyclic_pattern_counts(bits, m);
  const auto c_m1 = marginalize(c_m);
  const auto c_m2 = marginalize(c_m1);
  const double psi_m = psi_squared(c_m, n);
  const double psi_m1 = psi_squared(c_m1, n);
  const double psi_m2 = m >= 3 ? psi_squared(c_m2, n) : 0.0;

  // Both statistics are non-negative; clamp rounding noise.
  const double del1 = std::max(0.0, psi_m - psi_m1);
  const double del2 = std::max(0.0, psi_m - 2.0 * psi_m1 + psi_m2);
  return {Outcome{del1, igamc(std::pow(2.0, double(m) - 2.0), del1 / 2.0)},
          Outcome{del2, igamc(std::pow(2.0, double(m) - 3.0), del2 / 2.0)}};
}

Outcome approximate_entropy(BitView bits, unsigned m) {
  if (m < 1 || m > 23) throw ParameterError("approximate_entropy: m must lie in [1, 23]");
  detail::require_length(bits, std::size_t{1} << m, "approximate_entropy");
  const double n = double(bits.size());
  const auto c_m1 = cyclic_pattern_counts(bits, m + 1);
  const auto c_m = marginalize(c_m1);
  const double ap_en = phi(c_m, n) - phi(c_m1, n);
  const double chi2 = std::max(0.0, 2.0 * n * (std::numbers::ln2 - ap_en));
  return {chi2, igamc(std::pow(2.0, double(m) - 1.0), chi2 / 2.0)};
}

}  // namespace qrng::stattests
