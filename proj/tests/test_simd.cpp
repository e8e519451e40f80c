#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "qrng/simd/bit_kernels.hpp"

using namespace qrng::simd;

namespace {

// Lengths around every vector and tail boundary.
std::vector<std::size_t> probe_lengths() {
  std::vector<std::size_t> n;
  for (std::size_t i = 0; i <= 70; ++i) n.push_back(i);
  for (std::size_t base : {127u, 255u, 256u, 1000u, 4096u, 65'537u})
    for (std::size_t d = 0; d < 3; ++d) n.push_back(base + d);
  return n;
}

void compare(const BitKernels& a, const BitKernels& b) {
  std::mt19937_64 rng(99);
  for (std::size_t n : probe_lengths()) {
    for (int density : {0, 1, 50, 99, 100}) {
      std::vector<std::uint8_t> bits(n);
      for (auto& v : bits) v = std::uint8_t(int(rng() % 100) < density);
      CHECK(a.count_ones(bits.data(), n) == b.count_ones(bits.data(), n));
      CHECK(a.count_transitions(bits.data(), n) == b.count_transitions(bits.data(), n));
      CHECK(a.max_value(bits.data(), n) == b.max_value(bits.data(), n));

      std::vector<std::uint8_t> pa((n + 7) / 8, 0xAA), pb((n + 7) / 8, 0x55);
      a.pack_msb(bits.data(), n, pa.data());
      b.pack_msb(bits.data(), n, pb.data());
      CHECK(pa == pb);

      std::string text(n, '0');
      for (std::size_t i = 0; i < n; ++i) text[i] = char('0' + bits[i]);
      std::vector<std::uint8_t> oa(n), ob(n);
      CHECK(a.ascii_to_bits(text.data(), n, oa.data()) == n);
      CHECK(b.ascii_to_bits(text.data(), n, ob.data()) == n);
      CHECK(oa == bits);
      CHECK(ob == bits);
      if (n > 0) {
        const std::size_t bad = rng() % n;
        text[bad] = "2/ \n"[rng() % 4];
        CHECK(a.ascii_to_bits(text.data(), n, oa.data()) == bad);
        CHECK(b.ascii_to_bits(text.data(), n, ob.data()) == bad);
        bits[bad] = 7;
        CHECK(a.max_value(bits.data(), n) == 7);
        CHECK(b.max_value(bits.data(), n) == 7);
        CHECK(a.count_ones(bits.data(), n) == b.count_ones(bits.data(), n));
      }
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels on hand-checked inputs") {
  const auto& k = scalar_kernels();
  const std::uint8_t bits[] = {1, 0, 1, 1, 0, 0, 0, 1, 1};
  CHECK(k.count_ones(bits, 9) == 5);
  CHECK(k.count_transitions(bits, 9) == 4);
  CHECK(k.count_transitions(bits, 0) == 0);
  CHECK(k.max_value(bits, 0) == 0);
  std::uint8_t out[2];
  k.pack_msb(bits, 9, out);
  CHECK(out[0] == 0xB1);
  CHECK(out[1] == 0x80);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const BitKernels* avx2 = avx2_kernels();
  if (!avx2) {
    MESSAGE("AVX2 kernels unavailable on this machine");
    return;
  }
  compare(scalar_kernels(), *avx2);
}

TEST_CASE("dispatch honours the environment override") {
  const char* env = std::getenv("QRNG_SIMD");
  if (env && std::string(env) == "scalar") {
    CHECK(active_kernels().name == scalar_kernels().name);
  } else if (avx2_kernels()) {
    CHECK(active_kernels().name == avx2_kernels()->name);
  }
  compare(scalar_kernels(), active_kernels());
}
