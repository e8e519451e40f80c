#include <array>
#include <cmath>
#include <utility>

#include "common.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {
namespace {

constexpr int kDim = 32;

int gf2_rank(std::array<std::uint32_t, kDim> rows) {
  int rank = 0;
  for (int col = kDim - 1; col >= 0 && rank < kDim; --col) {
    const std::uint32_t bit = 1u << col;
    int pivot = rank;
    while (pivot < kDim && !(rows[pivot] & bit)) ++pivot;
    if (pivot == kDim) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < kDim; ++r)
      if (r != rank && (rows[r] & bit)) rows[r] ^= rows[rank];
    ++rank;
  }
  return rank;
}

// Probability that a random kDim x kDim GF(2) matrix has rank r.
double rank_probability(int r) {
  double log2p = double(r) * (2 * kDim - r) - double(kDim) * kDim;
  double prod = 1.0;
  for (int i = 0; i < r; ++i) {
    const double a = 1.0 - std::pow(2.0, i - kDim);
    prod *= a * a / (1.0 - std::pow(2.0, i - r));
  }
  return std::pow(2.0, log2p) * prod;
}

}  // namespace

Outcome binary_matrix_rank(BitView bits) {
  detail::require_length(bits, 38 * kDim * kDim, "binary_matrix_rank");
  const std::size_t matrices = bits.size() / (kDim * kDim);
  std::array<std::size_t, 3> counts{};  // full, full - 1, lower

  for (std::size_t k = 0; k < matrices; ++k) {
    std::array<std::uint32_t, kDim> rows{};
    const std::size_t base = k * kDim * kDim;
    for (int r = 0; r < kDim; ++r)
      for (int c = 0; c < kDim; ++c)
        rows[r] = (rows[r] << 1) | bits[base + std::size_t(r) * kDim + std::size_t(c)];
    const int rank = gf2_rank(rows);
    ++counts[rank == kDim ? 0 : rank == kDim - 1 ? 1 : 2];
  }

  const double p_full = rank_probability(kDim);
  const double p_minus1 = rank_probability(kDim - 1);
  const std::array<double, 3> probs{p_full, p_minus1, 1.0 - p_full - p_minus1};
  const double chi2 = detail::chi_squared(counts, probs, double(matrices));
  return {chi2, std::exp(-chi2 / 2.0)};
}

}  // namespace qrng::stattests
