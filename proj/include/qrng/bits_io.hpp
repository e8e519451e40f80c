#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace qrng {

enum class BitFormat {
  ascii,   // '0' / '1' characters, no newline
  packed,  // MSB-first bytes, zero padded; bit count in "<path>.count"
};

BitFormat parse_bit_format(std::string_view name);

/// Path of the one-line sidecar holding the valid-bit count of a packed file.
std::filesystem::path packed_sidecar(const std::filesystem::path& path);

/// Packs 0/1 values MSB-first; the final partial byte is zero padded.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t n_bits);

/// Converts '0'/'1' text to 0/1 values. Throws InputError naming the offset
/// of the first other character.
std::vector<std::uint8_t> bits_from_ascii(std::string_view text);

/// Atomic writes. Packed output also writes the sidecar.
void write_bits(const std::filesystem::path& path, std::span<const std::uint8_t> bits, BitFormat format);

/// ASCII input tolerates one trailing newline.
std::vector<std::uint8_t> read_bits(const std::filesystem::path& path, BitFormat format);

}  // namespace qrng
