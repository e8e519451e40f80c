#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qrng/time_tags.hpp"

namespace qrng {

/// What to do when one herald has candidates in both B channels.
enum class AmbiguityPolicy {
  discard_ambiguous,  // drop the herald and both candidates
  first_match,        // keep the closer candidate; equal distances are discarded
};

std::string_view policy_name(AmbiguityPolicy p);
/// Throws ParameterError for an unknown name.
AmbiguityPolicy parse_policy(std::string_view name);

inline constexpr std::uint64_t kDefaultWindowPs = 25'000;

struct CoincidenceParams {
  std::uint64_t window_ps = kDefaultWindowPs;  // inclusive: |t_A - t_B| <= window
  AmbiguityPolicy policy = AmbiguityPolicy::discard_ambiguous;
  /// Acquisition time used for the bit rate. When unset, the timestamp of the
  /// last event stands in for it (runs start at 0).
  std::optional<double> duration_s;
};

/// Extracted random bits: '0' for an A-B0 coincidence, '1' for A-B1, in
/// herald time order.
struct BitString {
  std::vector<std::uint8_t> bits;
  std::uint64_t n_coincidences_0 = 0;
  std::uint64_t n_coincidences_1 = 0;
  std::uint64_t n_ambiguous_discarded = 0;  // heralds dropped as ambiguous
  std::uint64_t n_unmatched_A = 0;
  std::uint64_t n_unmatched_B = 0;  // B events never paired nor discarded
  double duration_s = 0.0;
  double bit_rate_hz = 0.0;
};

/// Single-pass coincidence scanner. Memory is bounded by the number of events
/// inside one window span.
///
/// Heralds are resolved in time order once no later event can fall in their
/// window. For each herald the closest unused event of each B channel within
/// the window is the candidate (equal distances: the earlier event). Every
/// event takes part in at most one coincidence.
class CoincidenceExtractor {
 public:
  explicit CoincidenceExtractor(CoincidenceParams params);

  /// Feeds the next event. Throws OrderingError if it sorts before the
  /// previous one.
  void push(const TimeTagEvent& event);

  /// Flushes pending heralds and returns the result. The extractor is spent
  /// afterwards.
  BitString finish();

  std::size_t buffered_events() const noexcept;

 private:
  struct Pending {
    std::uint64_t t;
    bool used;
  };

  void resolve_until(std::uint64_t now, bool flush);
  void resolve(std::uint64_t t_a);
  void evict_before(std::uint64_t limit);

  CoincidenceParams params_;
  std::deque<std::uint64_t> heralds_;
  std::deque<Pending> arms_[2];
  std::optional<TimeTagEvent> last_;
  std::size_t index_ = 0;
  BitString out_;
};

/// Convenience wrapper over CoincidenceExtractor for an in-memory stream.
BitString extract_bits(std::span<const TimeTagEvent> stream, const CoincidenceParams& params);

/// Expected rate of accidental coincidences from uncorrelated singles:
/// singles_A * singles_B * 2 * window.
double accidental_rate(double singles_a_hz, double singles_b_hz, std::uint64_t window_ps);

}  // namespace qrng
