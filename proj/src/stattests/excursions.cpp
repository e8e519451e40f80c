#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "common.hpp"
#include "qrng/special_functions.hpp"

namespace qrng::stattests {
namespace {

constexpr std::size_t kExcursionMinBits = 1'000'000;

struct Walk {
  std::vector<long long> partial;  // S_1 .. S_n
  std::size_t cycles = 0;
};

Walk walk_of(BitView bits) {
  Walk w;
  w.partial.resize(bits.size());
  long long s = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    s += bits[i] ? 1 : -1;
    w.partial[i] = s;
    if (s == 0) ++w.cycles;
  }
  if (s != 0) ++w.cycles;  // the walk is closed with an implicit return to 0
  return w;
}

void require_cycles(const Walk& w, std::size_t n, const char* test) {
  const double needed = std::max(0.005 * std::sqrt(double(n)), 500.0);
  if (double(w.cycles) < needed)
    throw InsufficientDataError(std::string(test) + " needs at least " + std::to_string(int(needed)) +
                                " zero-crossing cycles, got " + std::to_string(w.cycles));
}

std::string state_label(int x) { return (x > 0 ? "+" : "") + std::to_string(x); }

}  // namespace

std::vector<LabelledOutcome> random_excursions(BitView bits) {
  detail::require_length(bits, kExcursionMinBits, "random_excursions");
  const Walk w = walk_of(bits);
  require_cycles(w, bits.size(), "random_excursions");

  constexpr std::array<int, 8> kStates{-4, -3, -2, -1, 1, 2, 3, 4};
  // counts[state][k]: cycles visiting the state exactly k times (k >= 5 pooled).
  std::array<std::array<std::size_t, 6>, 8> counts{};
  std::array<std::size_t, 9> visits{};  // per state in the current cycle, indexed x + 4

  auto close_cycle = [&] {
    for (std::size_t s = 0; s < kStates.size(); ++s) {
      const std::size_t v = visits[std::size_t(kStates[s] + 4)];
      ++counts[s][std::min<std::size_t>(v, 5)];
    }
    visits.fill(0);
  };

  for (long long s : w.partial) {
    if (s == 0) {
      close_cycle();
    } else if (s >= -4 && s <= 4) {
      ++visits[std::size_t(s + 4)];
    }
  }
  if (!w.partial.empty() && w.partial.back() != 0) close_cycle();

  const double J = double(w.cycles);
  std::vector<LabelledOutcome> out;
  for (std::size_t s = 0; s < kStates.size(); ++s) {
    const double ax = std::abs(kStates[s]);
    const double q = 1.0 - 1.0 / (2.0 * ax);
    std::array<double, 6> probs{};
    probs[0] = q;
    for (int k = 1; k <= 4; ++k) probs[std::size_t(k)] = 1.0 / (4.0 * ax * ax) * std::pow(q, k - 1);
    probs[5] = 1.0 / (2.0 * ax) * std::pow(q, 4);
    const double chi2 = detail::chi_squared(counts[s], probs, J);
    out.push_back({state_label(kStates[s]), {chi2, igamc(2.5, chi2 / 2.0)}});
  }
  return out;
}

std::vector<LabelledOutcome> random_excursions_variant(BitView bits) {
  detail::require_length(bits, kExcursionMinBits, "random_excursions_variant");
  const Walk w = walk_of(bits);
  require_cycles(w, bits.size(), "random_excursions_variant");

  std::array<std::size_t, 19> visits{};  // indexed x + 9
  for (long long s : w.partial)
    if (s >= -9 && s <= 9) ++visits[std::size_t(s + 9)];

  const double J = double(w.cycles);
  std::vector<LabelledOutcome> out;
  for (int x = -9; x <= 9; ++x) {
    if (x == 0) continue;
    const double xi = double(visits[std::size_t(x + 9)]);
    const double stat = std::abs(xi - J) / std::sqrt(2.0 * J * (4.0 * std::abs(x) - 2.0));
    out.push_back({state_label(x), {xi, erfc(stat)}});
  }
  return out;
}

}  // namespace qrng::stattests
