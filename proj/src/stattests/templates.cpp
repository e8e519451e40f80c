#include <array>
#include <cmath>

#include "common.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {
namespace {

constexpr std::size_t kNonOverlappingBlocks = 8;

// Overlapping template of nine ones in blocks of 1032 bits, K = 5.
constexpr unsigned kOverlapM = 9;
constexpr std::size_t kOverlapBlock = 1032;
constexpr std::array<double, 6> kOverlapProbs{0.364091, 0.185659, 0.139381,
                                              0.100571, 0.070432, 0.139865};

std::string template_label(std::uint32_t t, unsigned m) {
  std::string s(m, '0');
  for (unsigned i = 0; i < m; ++i)
    if (t >> (m - 1 - i) & 1u) s[i] = '1';
  return s;
}

}  // namespace

std::vector<std::uint32_t> aperiodic_templates(unsigned m) {
  if (m < 2 || m > 16) throw ParameterError("template length must lie in [2, 16]");
  std::vector<std::uint32_t> out;
  for (std::uint32_t t = 0; t < (1u << m); ++t) {
    bool bordered = false;
    // A border of length k: the top k bits equal the bottom k bits.
    for (unsigned k = 1; k < m && !bordered; ++k)
      bordered = (t >> (m - k)) == (t & ((1u << k) - 1u));
    if (!bordered) out.push_back(t);
  }
  return out;
}

std::vector<LabelledOutcome> non_overlapping_template(BitView bits, unsigned m) {
  const std::vector<std::uint32_t> templates = aperiodic_templates(m);
  // Expected count per block should be at least 5.
  const std::size_t min_block = 5 * (std::size_t{1} << m) + m;
  detail::require_length(bits, kNonOverlappingBlocks * min_block, "non_overlapping_template");

  const std::size_t block = bits.size() / kNonOverlappingBlocks;
  const double mu = double(block - m + 1) / std::pow(2.0, m);
  const double var = double(block) * (1.0 / std::pow(2.0, m) - (2.0 * m - 1.0) / std::pow(2.0, 2.0 * m));
  const std::uint32_t mask = (1u << m) - 1u;

  // Per block, the window value at every position; reused for all templates.
  std::vector<std::uint32_t> windows(block - m + 1);
  std::vector<std::array<std::uint32_t, kNonOverlappingBlocks>> hits(templates.size());
  std::vector<std::size_t> index_of(std::size_t{1} << m, templates.size());
  for (std::size_t i = 0; i < templates.size(); ++i) index_of[templates[i]] = i;

  for (std::size_t b = 0; b < kNonOverlappingBlocks; ++b) {
    const std::size_t base = b * block;
    std::uint32_t w = 0;
    for (std::size_t i = 0; i < block; ++i) {
      w = ((w << 1) | bits[base + i]) & mask;
      if (i + 1 >= m) windows[i + 1 - m] = w;
    }
    // Aperiodic templates cannot overlap themselves, so skipping m after a
    // hit only matters for that template's own next occurrence.
    std::vector<std::size_t> next_allowed(templates.size(), 0);
    for (std::size_t pos = 0; pos < windows.size(); ++pos) {
      const std::size_t t = index_of[windows[pos]];
      if (t == templates.size() || pos < next_allowed[t]) continue;
      ++hits[t][b];
      next_allowed[t] = pos + m;
    }
  }

  std::vector<LabelledOutcome> out;
  out.reserve(templates.size());
  for (std::size_t t = 0; t < templates.size(); ++t) {
    double chi2 = 0.0;
    for (std::uint32_t w : hits[t]) chi2 += (double(w) - mu) * (double(w) - mu) / var;
    out.push_back({template_label(templates[t], m),
                   {chi2, igamc(double(kNonOverlappingBlocks) / 2.0, chi2 / 2.0)}});
  }
  return out;
}

Outcome overlapping_template(BitView bits) {
  detail::require_length(bits, 100 * kOverlapBlock, "overlapping_template");
  const std::size_t blocks = bits.size() / kOverlapBlock;
  std::array<std::size_t, 6> counts{};
  for (std::size_t b = 0; b < blocks; ++b) {
    unsigned run = 0;
    std::size_t matches = 0;
    for (std::size_t i = b * kOverlapBlock; i < (b + 1) * kOverlapBlock; ++i) {
      run = bits[i] ? run + 1 : 0;
      if (run >= kOverlapM) ++matches;
    }
    ++counts[std::min<std::size_t>(matches, 5)];
  }
  const double chi2 = detail::chi_squared(counts, kOverlapProbs, double(blocks));
  return {chi2, igamc(5.0 / 2.0, chi2 / 2.0)};
}

}  // namespace qrng::stattests
