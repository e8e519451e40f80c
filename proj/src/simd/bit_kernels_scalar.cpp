#include "qrng/simd/bit_kernels.hpp"

#include <algorithm>
#include <cstring>

namespace qrng::simd {
namespace {

std::uint64_t count_ones_scalar(const std::uint8_t* bits, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += bits[i];
  return total;
}

std::uint64_t count_transitions_scalar(const std::uint8_t* bits, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 1; i < n; ++i) total += bits[i] != bits[i - 1];
  return total;
}

std::uint8_t max_value_scalar(const std::uint8_t* bits, std::size_t n) {
  std::uint8_t m = 0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, bits[i]);
  return m;
}

std::size_t ascii_to_bits_scalar(const char* text, std::size_t n, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = static_cast<std::uint8_t>(text[i] - '0');
    if (d > 1) return i;
    out[i] = d;
  }
  return n;
}

void pack_msb_scalar(const std::uint8_t* bits, std::size_t n, std::uint8_t* out) {
  std::memset(out, 0, (n + 7) / 8);
  for (std::size_t i = 0; i < n; ++i)
    out[i / 8] |= static_cast<std::uint8_t>((bits[i] & 1u) << (7 - i % 8));
}

}  // namespace

const BitKernels& scalar_kernels() {
  static const BitKernels k{"scalar",           count_ones_scalar,    count_transitions_scalar,
                            max_value_scalar,   ascii_to_bits_scalar, pack_msb_scalar};
  return k;
}

}  // namespace qrng::simd
