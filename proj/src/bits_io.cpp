#include "qrng/bits_io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "qrng/error.hpp"
#include "qrng/manifest.hpp"
#include "qrng/simd/bit_kernels.hpp"

namespace qrng {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open bit file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void require_binary(std::span<const std::uint8_t> bits) {
  if (simd::max_value(bits) > 1) throw InputError("bit values must be 0 or 1");
}

}  // namespace

BitFormat parse_bit_format(std::string_view name) {
  if (name == "ascii") return BitFormat::ascii;
  if (name == "packed") return BitFormat::packed;
  throw ParameterError("unknown bit format '" + std::string(name) + "' (expected ascii or packed)");
}

std::filesystem::path packed_sidecar(const std::filesystem::path& path) {
  auto p = path;
  p += ".count";
  return p;
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  require_binary(bits);
  std::vector<std::uint8_t> out((bits.size() + 7) / 8);
  simd::active_kernels().pack_msb(bits.data(), bits.size(), out.data());
  return out;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t n_bits) {
  if (bytes.size() != (n_bits + 7) / 8)
    throw ParseError("bit count " + std::to_string(n_bits) + " does not match " +
                         std::to_string(bytes.size()) + " packed bytes",
                     0);
  std::vector<std::uint8_t> bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return bits;
}

std::vector<std::uint8_t> bits_from_ascii(std::string_view text) {
  std::vector<std::uint8_t> bits(text.size());
  const std::size_t bad = simd::active_kernels().ascii_to_bits(text.data(), text.size(), bits.data());
  if (bad != text.size())
    throw InputError("invalid bit character at offset " + std::to_string(bad) +
                     " (expected '0' or '1')");
  return bits;
}

void write_bits(const std::filesystem::path& path, std::span<const std::uint8_t> bits, BitFormat format) {
  require_binary(bits);
  if (format == BitFormat::ascii) {
    std::string text(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) text[i] = static_cast<char>('0' + bits[i]);
    write_file_atomic(path, text);
    return;
  }
  const auto packed = pack_bits(bits);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(packed.data()), packed.size()));
  write_file_atomic(packed_sidecar(path), std::to_string(bits.size()) + "\n");
}

std::vector<std::uint8_t> read_bits(const std::filesystem::path& path, BitFormat format) {
  std::string raw = slurp(path);
  if (format == BitFormat::ascii) {
    if (!raw.empty() && raw.back() == '\n') raw.pop_back();
    return bits_from_ascii(raw);
  }
  const std::string count_text = slurp(packed_sidecar(path));
  std::istringstream in(count_text);
  std::uint64_t n_bits = 0;
  if (!(in >> n_bits)) throw ParseError("sidecar " + packed_sidecar(path).string() + " holds no bit count", 0);
  return unpack_bits(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()), n_bits);
}

}  // namespace qrng
