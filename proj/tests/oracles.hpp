#pragma once

// Slow, obviously-correct reference implementations used to check the
// optimized library code.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qrng/coincidence.hpp"

namespace qrng::testing {

/// Quadratic coincidence matcher with the library's rules and no streaming:
/// heralds in stream order, each takes the closest unused B event of each
/// channel within the window (earlier event on equal distance).
inline BitString brute_force_extract(std::span<const TimeTagEvent> stream, const CoincidenceParams& p) {
  const std::size_t n = stream.size();
  std::vector<bool> used(n, false);
  BitString out;
  for (std::size_t i = 0; i < n; ++i) {
    if (stream[i].channel != Channel::A) continue;
    const std::uint64_t ta = stream[i].timestamp_ps;
    std::size_t best[2] = {n, n};
    std::uint64_t best_d[2] = {std::numeric_limits<std::uint64_t>::max(), std::numeric_limits<std::uint64_t>::max()};
    for (std::size_t j = 0; j < n; ++j) {
      if (stream[j].channel == Channel::A || used[j]) continue;
      const std::uint64_t tb = stream[j].timestamp_ps;
      const std::uint64_t d = tb > ta ? tb - ta : ta - tb;
      const int k = stream[j].channel == Channel::B0 ? 0 : 1;
      if (d > p.window_ps) continue;
      if (d < best_d[k] || (d == best_d[k] && tb < stream[best[k]].timestamp_ps)) {
        best_d[k] = d;
        best[k] = j;
      }
    }
    const bool has0 = best[0] != n, has1 = best[1] != n;
    if (!has0 && !has1) {
      ++out.n_unmatched_A;
      continue;
    }
    if (has0 && has1 && (p.policy == AmbiguityPolicy::discard_ambiguous || best_d[0] == best_d[1])) {
      used[best[0]] = used[best[1]] = true;
      ++out.n_ambiguous_discarded;
      continue;
    }
    const int k = (has0 && (!has1 || best_d[0] < best_d[1])) ? 0 : 1;
    used[best[k]] = true;
    out.bits.push_back(std::uint8_t(k));
    ++(k == 0 ? out.n_coincidences_0 : out.n_coincidences_1);
  }
  for (std::size_t j = 0; j < n; ++j)
    if (stream[j].channel != Channel::A && !used[j]) ++out.n_unmatched_B;
  return out;
}

}  // namespace qrng::testing
