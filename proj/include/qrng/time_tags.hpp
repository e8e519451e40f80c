#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qrng {

enum class Channel : std::uint8_t { A = 0, B0 = 1, B1 = 2 };

inline constexpr int kChannelCount = 3;

std::string_view channel_name(Channel c);

/// One detection: channel plus picoseconds since the start of the run.
/// Ordering is by timestamp, then channel (A < B0 < B1).
struct TimeTagEvent {
  Channel channel = Channel::A;
  std::uint64_t timestamp_ps = 0;

  friend bool operator==(const TimeTagEvent&, const TimeTagEvent&) = default;
  friend std::strong_ordering operator<=>(const TimeTagEvent& a, const TimeTagEvent& b) {
    if (auto c = a.timestamp_ps <=> b.timestamp_ps; c != 0) return c;
    return a.channel <=> b.channel;
  }
};

// QTAG layout, little-endian throughout:
//   header  "QTAG" | u16 version | 2 reserved bytes | u64 record count
//   record  u8 channel | u64 timestamp_ps
inline constexpr std::size_t kTagHeaderSize = 16;
inline constexpr std::size_t kTagRecordSize = 9;
inline constexpr std::uint16_t kTagFormatVersion = 1;

void write_tags(std::span<const TimeTagEvent> events, std::ostream& out);
void write_tags(std::span<const TimeTagEvent> events, const std::filesystem::path& path);

/// Reads and validates a whole tag file. Throws ParseError (with the byte
/// offset) on a bad header, truncated record, unknown channel byte or
/// out-of-order timestamps.
std::vector<TimeTagEvent> read_tags(std::istream& in);
std::vector<TimeTagEvent> read_tags(const std::filesystem::path& path);

/// Incremental reader with the same validation as read_tags, for files too
/// large to hold in memory.
class TagReader {
 public:
  explicit TagReader(const std::filesystem::path& path);

  std::uint64_t record_count() const noexcept { return count_; }
  /// Next event, or nullopt after the last record.
  std::optional<TimeTagEvent> next();

 private:
  std::ifstream in_;
  std::uint64_t count_ = 0;
  std::uint64_t index_ = 0;
  std::uint64_t file_size_ = 0;
  std::optional<TimeTagEvent> previous_;
};

}  // namespace qrng
