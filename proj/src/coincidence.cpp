#include "qrng/coincidence.hpp"

#include <limits>

#include "qrng/error.hpp"

namespace qrng {
namespace {

std::uint64_t distance(std::uint64_t a, std::uint64_t b) { return a > b ? a - b : b - a; }

}  // namespace

std::string_view policy_name(AmbiguityPolicy p) {
  return p == AmbiguityPolicy::first_match ? "first_match" : "discard_ambiguous";
}

AmbiguityPolicy parse_policy(std::string_view name) {
  if (name == "discard_ambiguous") return AmbiguityPolicy::discard_ambiguous;
  if (name == "first_match") return AmbiguityPolicy::first_match;
  throw ParameterError("unknown ambiguity policy '" + std::string(name) + "'");
}

CoincidenceExtractor::CoincidenceExtractor(CoincidenceParams params) : params_(params) {
  if (params_.window_ps == 0) throw ParameterError("coincidence window must be positive");
  if (params_.duration_s && !(*params_.duration_s >= 0.0))
    throw ParameterError("duration must be non-negative");
}

std::size_t CoincidenceExtractor::buffered_events() const noexcept {
  return heralds_.size() + arms_[0].size() + arms_[1].size();
}

void CoincidenceExtractor::push(const TimeTagEvent& event) {
  if (last_ && event < *last_) throw OrderingError("time-tag stream is not sorted", index_);
  last_ = event;
  ++index_;

  resolve_until(event.timestamp_ps, false);
  if (event.channel == Channel::A)
    heralds_.push_back(event.timestamp_ps);
  else
    arms_[event.channel == Channel::B0 ? 0 : 1].push_back({event.timestamp_ps, false});

  // A B event older than every pending and future herald's window is dead.
  const std::uint64_t oldest = heralds_.empty() ? event.timestamp_ps : heralds_.front();
  if (oldest > params_.window_ps) evict_before(oldest - params_.window_ps);
}

void CoincidenceExtractor::resolve_until(std::uint64_t now, bool flush) {
  // A herald at t can still gain candidates while now <= t + window.
  while (!heralds_.empty()) {
    const std::uint64_t t_a = heralds_.front();
    if (!flush && now <= t_a + params_.window_ps) break;
    heralds_.pop_front();
    resolve(t_a);
  }
}

void CoincidenceExtractor::evict_before(std::uint64_t limit) {
  for (auto& arm : arms_) {
    while (!arm.empty() && arm.front().t < limit) {
      if (!arm.front().used) ++out_.n_unmatched_B;
      arm.pop_front();
    }
  }
}

void CoincidenceExtractor::resolve(std::uint64_t t_a) {
  if (t_a > params_.window_ps) evict_before(t_a - params_.window_ps);

  Pending* best[2] = {nullptr, nullptr};
  for (int k = 0; k < 2; ++k) {
    std::uint64_t best_d = std::numeric_limits<std::uint64_t>::max();
    for (auto& b : arms_[k]) {
      if (b.t > t_a + params_.window_ps) break;
      if (b.used) continue;
      const std::uint64_t d = distance(b.t, t_a);
      if (d <= params_.window_ps && d < best_d) {
        best_d = d;
        best[k] = &b;
      }
    }
  }

  if (!best[0] && !best[1]) {
    ++out_.n_unmatched_A;
    return;
  }

  int winner = best[0] ? 0 : 1;
  if (best[0] && best[1]) {
    const std::uint64_t d0 = distance(best[0]->t, t_a);
    const std::uint64_t d1 = distance(best[1]->t, t_a);
    if (params_.policy == AmbiguityPolicy::discard_ambiguous || d0 == d1) {
      best[0]->used = true;
      best[1]->used = true;
      ++out_.n_ambiguous_discarded;
      return;
    }
    winner = d0 < d1 ? 0 : 1;
  }

  best[winner]->used = true;
  out_.bits.push_back(static_cast<std::uint8_t>(winner));
  ++(winner == 0 ? out_.n_coincidences_0 : out_.n_coincidences_1);
}

BitString CoincidenceExtractor::finish() {
  resolve_until(0, true);
  evict_before(std::numeric_limits<std::uint64_t>::max());
  out_.duration_s = params_.duration_s.value_or(last_ ? double(last_->timestamp_ps) * 1e-12 : 0.0);
  out_.bit_rate_hz = out_.duration_s > 0.0 ? double(out_.bits.size()) / out_.duration_s : 0.0;
  return std::move(out_);
}

BitString extract_bits(std::span<const TimeTagEvent> stream, const CoincidenceParams& params) {
  CoincidenceExtractor extractor(params);
  for (const auto& e : stream) extractor.push(e);
  return extractor.finish();
}

double accidental_rate(double singles_a_hz, double singles_b_hz, std::uint64_t window_ps) {
  if (!(singles_a_hz >= 0.0) || !(singles_b_hz >= 0.0))
    throw ParameterError("singles rates must be non-negative");
  return singles_a_hz * singles_b_hz * 2.0 * double(window_ps) * 1e-12;
}

}  // namespace qrng
