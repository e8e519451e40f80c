// Compiled with -mavx2. Nothing in here may run before dispatch.cpp has
// confirmed AVX2 support.

#include <immintrin.h>

#include <cstring>

#include "qrng/simd/bit_kernels.hpp"

namespace qrng::simd {
namespace {

std::uint64_t hsum_epi64(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

std::uint64_t count_ones_avx2(const std::uint8_t* bits, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = zero;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, zero));
  }
  std::uint64_t total = hsum_epi64(acc);
  for (; i < n; ++i) total += bits[i];
  return total;
}

std::uint64_t count_transitions_avx2(const std::uint8_t* bits, std::size_t n) {
  if (n < 2) return 0;
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi8(1);
  __m256i acc = zero;
  std::size_t i = 0;
  // Compare bits[i..i+32) with bits[i+1..i+33).
  for (; i + 33 <= n; i += 32) {
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i + 1));
    const __m256i differ = _mm256_andnot_si256(_mm256_cmpeq_epi8(a, b), one);
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(differ, zero));
  }
  std::uint64_t total = hsum_epi64(acc);
  for (; i + 1 < n; ++i) total += bits[i] != bits[i + 1];
  return total;
}

std::uint8_t max_value_avx2(const std::uint8_t* bits, std::size_t n) {
  __m256i m = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32)
    m = _mm256_max_epu8(m, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i)));
  alignas(32) std::uint8_t lanes[32];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), m);
  std::uint8_t best = 0;
  for (std::uint8_t v : lanes) best = v > best ? v : best;
  for (; i < n; ++i) best = bits[i] > best ? bits[i] : best;
  return best;
}

std::size_t ascii_to_bits_avx2(const char* text, std::size_t n, std::uint8_t* out) {
  const __m256i ascii_zero = _mm256_set1_epi8('0');
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(text + i));
    const __m256i d = _mm256_sub_epi8(v, ascii_zero);
    // d <= 1 (unsigned) iff max(d, 1) == 1.
    const __m256i ok = _mm256_cmpeq_epi8(_mm256_max_epu8(d, one), one);
    if (_mm256_movemask_epi8(ok) != -1) break;  // locate the culprit below
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), d);
  }
  for (; i < n; ++i) {
    const auto d = static_cast<std::uint8_t>(text[i] - '0');
    if (d > 1) return i;
    out[i] = d;
  }
  return n;
}

void pack_msb_avx2(const std::uint8_t* bits, std::size_t n, std::uint8_t* out) {
  // Reverse each 8-byte group so movemask yields MSB-first bytes.
  const __m256i reverse8 = _mm256_setr_epi8(7, 6, 5, 4, 3, 2, 1, 0, 15, 14, 13, 12, 11, 10, 9, 8,
                                            7, 6, 5, 4, 3, 2, 1, 0, 15, 14, 13, 12, 11, 10, 9, 8);
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    v = _mm256_and_si256(v, one);
    v = _mm256_shuffle_epi8(v, reverse8);
    // Move bit 0 of every byte to bit 7; bits are 0/1 so nothing spills.
    const auto mask = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_slli_epi16(v, 7)));
    std::memcpy(out + i / 8, &mask, sizeof(mask));
  }
  if (i < n) scalar_kernels().pack_msb(bits + i, n - i, out + i / 8);
}

}  // namespace

const BitKernels& avx2_kernel_table() {
  static const BitKernels k{"avx2",         count_ones_avx2,    count_transitions_avx2,
                            max_value_avx2, ascii_to_bits_avx2, pack_msb_avx2};
  return k;
}

}  // namespace qrng::simd
