#pragma once

// Byte-per-bit kernels used by the bit I/O and the statistical tests.
//
// Every kernel has a scalar reference in bit_kernels_scalar.cpp. Vector
// variants (AVX2 on x86-64) live in their own translation units, compiled
// with the matching target flags, and are picked at runtime by
// active_kernels(). Setting QRNG_SIMD=scalar in the environment forces the
// reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace qrng::simd {

struct BitKernels {
  std::string_view name;

  /// Sum of all byte values (the number of ones for 0/1 data).
  std::uint64_t (*count_ones)(const std::uint8_t* bits, std::size_t n);

  /// Number of i in [0, n-1) with bits[i] != bits[i+1].
  std::uint64_t (*count_transitions)(const std::uint8_t* bits, std::size_t n);

  /// Largest byte value, 0 for empty input.
  std::uint8_t (*max_value)(const std::uint8_t* bits, std::size_t n);

  /// Writes text[i] - '0' to out[i]. Returns n on success, otherwise the
  /// index of the first character that is not '0' or '1' (out is then
  /// unspecified from that index on).
  std::size_t (*ascii_to_bits)(const char* text, std::size_t n, std::uint8_t* out);

  /// Packs n 0/1 values MSB-first into ceil(n/8) bytes, zero padded.
  void (*pack_msb)(const std::uint8_t* bits, std::size_t n, std::uint8_t* out);
};

const BitKernels& scalar_kernels();

/// AVX2 kernels, or nullptr if they were not built or the CPU lacks AVX2.
const BitKernels* avx2_kernels();

/// Best kernel set for this machine, chosen once.
const BitKernels& active_kernels();

inline std::uint64_t count_ones(std::span<const std::uint8_t> bits) {
  return active_kernels().count_ones(bits.data(), bits.size());
}

inline std::uint64_t count_transitions(std::span<const std::uint8_t> bits) {
  return active_kernels().count_transitions(bits.data(), bits.size());
}

inline std::uint8_t max_value(std::span<const std::uint8_t> bits) {
  return active_kernels().max_value(bits.data(), bits.size());
}

}  // namespace qrng::simd
