#include "qrng/time_tags.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "qrng/error.hpp"
#include "qrng/manifest.hpp"

namespace qrng {
namespace {

constexpr std::array<char, 4> kMagic = {'Q', 'T', 'A', 'G'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return static_cast<T>(v);
}

struct Header {
  std::uint64_t count;
};

Header parse_header(std::istream& in) {
  std::array<unsigned char, kTagHeaderSize> h{};
  in.read(reinterpret_cast<char*>(h.data()), h.size());
  if (in.gcount() != static_cast<std::streamsize>(h.size()))
    throw ParseError("truncated QTAG header", static_cast<std::uint64_t>(in.gcount()));
  if (std::memcmp(h.data(), kMagic.data(), kMagic.size()) != 0) throw ParseError("bad QTAG magic", 0);
  const auto version = get_le<std::uint16_t>(h.data() + 4);
  if (version != kTagFormatVersion)
    throw ParseError("unsupported QTAG version " + std::to_string(version), 4);
  return {get_le<std::uint64_t>(h.data() + 8)};
}

TimeTagEvent decode_record(const unsigned char* rec, std::uint64_t offset,
                           const std::optional<TimeTagEvent>& previous) {
  if (rec[0] >= kChannelCount)
    throw ParseError("unknown channel byte " + std::to_string(rec[0]), offset);
  TimeTagEvent ev{static_cast<Channel>(rec[0]), get_le<std::uint64_t>(rec + 1)};
  if (previous && ev < *previous) throw ParseError("timestamps are not monotone", offset);
  return ev;
}

std::uint64_t record_offset(std::uint64_t index) { return kTagHeaderSize + index * kTagRecordSize; }

}  // namespace

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::A: return "A";
    case Channel::B0: return "B0";
    case Channel::B1: return "B1";
  }
  return "?";
}

void write_tags(std::span<const TimeTagEvent> events, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kTagFormatVersion);
  put_le<std::uint16_t>(out, 0);
  put_le<std::uint64_t>(out, events.size());
  for (const auto& e : events) {
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.channel));
    put_le<std::uint64_t>(out, e.timestamp_ps);
  }
}

void write_tags(std::span<const TimeTagEvent> events, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) { write_tags(events, out); });
}

std::vector<TimeTagEvent> read_tags(std::istream& in) {
  const Header header = parse_header(in);
  // Read the body in one go so length mismatches are caught before parsing.
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::uint64_t whole = body.size() / kTagRecordSize;
  if (whole < header.count)
    throw ParseError("truncated record (header declares " + std::to_string(header.count) +
                         " records)",
                     record_offset(whole));
  if (body.size() != header.count * kTagRecordSize)
    throw ParseError("trailing bytes after the declared records", record_offset(header.count));

  std::vector<TimeTagEvent> events;
  events.reserve(header.count);
  const auto* p = reinterpret_cast<const unsigned char*>(body.data());
  std::optional<TimeTagEvent> previous;
  for (std::uint64_t i = 0; i < header.count; ++i) {
    events.push_back(decode_record(p + i * kTagRecordSize, record_offset(i), previous));
    previous = events.back();
  }
  return events;
}

std::vector<TimeTagEvent> read_tags(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tag file " + path.string());
  return read_tags(in);
}

TagReader::TagReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open tag file " + path.string());
  std::error_code ec;
  file_size_ = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat tag file " + path.string());
  count_ = parse_header(in_).count;
  const std::uint64_t body = file_size_ - kTagHeaderSize;
  if (body / kTagRecordSize < count_)
    throw ParseError("truncated record (header declares " + std::to_string(count_) + " records)",
                     record_offset(body / kTagRecordSize));
  if (body != count_ * kTagRecordSize)
    throw ParseError("trailing bytes after the declared records", record_offset(count_));
}

std::optional<TimeTagEvent> TagReader::next() {
  if (index_ >= count_) return std::nullopt;
  std::array<unsigned char, kTagRecordSize> rec{};
  in_.read(reinterpret_cast<char*>(rec.data()), rec.size());
  if (in_.gcount() != static_cast<std::streamsize>(rec.size()))
    throw ParseError("truncated record", record_offset(index_));
  previous_ = decode_record(rec.data(), record_offset(index_), previous_);
  ++index_;
  return previous_;
}

}  // namespace qrng
