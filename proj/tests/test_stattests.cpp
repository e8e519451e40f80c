#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include <doctest.h>

#include "qrng/bits_io.hpp"
#include "qrng/coincidence.hpp"
#include "qrng/photon_sim.hpp"
#include "qrng/special_functions.hpp"
#include "qrng/stattests.hpp"

using namespace qrng;
using namespace qrng::stattests;

namespace {

std::vector<std::uint8_t> bits_of(std::string_view s) { return bits_from_ascii(s); }

const std::vector<std::uint8_t>& e_bits() {
  static const auto bits =
      read_bits(std::filesystem::path(QRNG_TEST_DATA_DIR) / "e_expansion.bin", BitFormat::packed);
  return bits;
}

constexpr std::string_view kPi100 =
    "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000";

double p_of(const std::vector<LabelledOutcome>& v, std::string_view label) {
  for (const auto& o : v)
    if (o.variant == label) return o.outcome.p_value;
  FAIL("missing variant " << label);
  return -1.0;
}

std::vector<std::uint8_t> random_bits(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; i += 64) {
    std::uint64_t w = rng();
    for (std::size_t j = i; j < std::min(n, i + 64); ++j, w >>= 1) bits[j] = std::uint8_t(w & 1);
  }
  return bits;
}

}  // namespace

TEST_CASE("short worked examples") {
  CHECK(frequency_monobit(bits_of("1011010101")).p_value == doctest::Approx(0.5270892568655).epsilon(1e-10));
  const Outcome r = runs(bits_of("1001101011"));
  CHECK(r.statistic == 7.0);
  CHECK(r.p_value == doctest::Approx(0.1472322553637).epsilon(1e-10));
  CHECK(block_frequency(bits_of("0110011010"), 3).p_value == doctest::Approx(0.801252).epsilon(1e-6));
  CHECK(cumulative_sums(bits_of("1011010111"), CusumMode::forward).p_value ==
        doctest::Approx(0.4116588).epsilon(1e-6));
  const auto s = serial(bits_of("0011011101"), 3);
  CHECK(s[0].p_value == doctest::Approx(0.808792).epsilon(1e-6));
  CHECK(s[1].p_value == doctest::Approx(0.670320).epsilon(1e-6));
  CHECK(approximate_entropy(bits_of("0100110101"), 3).p_value == doctest::Approx(0.261961).epsilon(1e-6));
  CHECK(longest_run_of_ones(bits_of("1100110000010101011011000100110011100000000000100100110101010001"
                                    "0001001111010110100000001101011111001100111001101101100010110010"))
            .p_value == doctest::Approx(0.180609).epsilon(1e-5));
}

TEST_CASE("first hundred bits of pi") {
  const auto bits = bits_of(kPi100);
  CHECK(frequency_monobit(bits).p_value == doctest::Approx(0.109599).epsilon(1e-5));
  CHECK(block_frequency(bits, 10).p_value == doctest::Approx(0.706438).epsilon(1e-5));
  CHECK(runs(bits).p_value == doctest::Approx(0.500798).epsilon(1e-5));
  CHECK(cumulative_sums(bits, CusumMode::forward).p_value == doctest::Approx(0.219194).epsilon(1e-5));
  CHECK(cumulative_sums(bits, CusumMode::backward).p_value == doctest::Approx(0.114866).epsilon(1e-5));
  CHECK(approximate_entropy(bits, 2).p_value == doctest::Approx(0.235301).epsilon(1e-5));
}

TEST_CASE("million bits of e, core kernels") {
  const auto& e = e_bits();
  const double tol = 2e-6;
  CHECK(std::abs(frequency_monobit(e).p_value - 0.953749) < tol);
  CHECK(std::abs(block_frequency(e, 128).p_value - 0.211072) < tol);
  CHECK(std::abs(runs(e).p_value - 0.561917) < tol);
  CHECK(std::abs(longest_run_of_ones(e).p_value - 0.718945) < tol);
  CHECK(std::abs(cumulative_sums(e, CusumMode::forward).p_value - 0.669886) < tol);
  CHECK(std::abs(cumulative_sums(e, CusumMode::backward).p_value - 0.724265) < tol);
  CHECK(std::abs(dft_spectral(e).p_value - 0.847187) < tol);
  const auto s2 = serial(e, 2);
  CHECK(std::abs(s2[0].p_value - 0.843764) < tol);
  CHECK(std::abs(s2[1].p_value - 0.561915) < tol);
  const auto s16 = serial(e, 16);
  CHECK(std::abs(s16[0].p_value - 0.766182) < tol);
  CHECK(std::abs(s16[1].p_value - 0.462921) < tol);
  CHECK(std::abs(approximate_entropy(e, 10).p_value - 0.700073) < tol);
}

TEST_CASE("million bits of e, extended kernels") {
  const auto& e = e_bits();
  const double tol = 2e-6;
  CHECK(std::abs(binary_matrix_rank(e).p_value - 0.306156) < tol);
  CHECK(std::abs(p_of(non_overlapping_template(e), "000000001") - 0.078790) < tol);
  CHECK(std::abs(overlapping_template(e).p_value - 0.159027) < tol);
  CHECK(std::abs(universal(e).p_value - 0.282568) < tol);
  CHECK(std::abs(linear_complexity(e, 500).p_value - 0.826202) < tol);
  CHECK(std::abs(linear_complexity(e, 1000).p_value - 0.844738) < tol);

  const auto ex = random_excursions(e);
  REQUIRE(ex.size() == 8);
  const std::map<std::string, double> expected{{"-4", 0.573306}, {"-3", 0.197996}, {"-2", 0.164011},
                                               {"-1", 0.007779}, {"+1", 0.786868}, {"+2", 0.440912},
                                               {"+3", 0.797854}, {"+4", 0.778186}};
  for (const auto& [label, p] : expected) CHECK(std::abs(p_of(ex, label) - p) < tol);
  const auto var = random_excursions_variant(e);
  CHECK(var.size() == 18);
  CHECK(std::abs(p_of(var, "-9") - 0.858946) < tol);
}

TEST_CASE("template and complexity helpers") {
  CHECK(aperiodic_templates(2) == std::vector<std::uint32_t>{0b01, 0b10});
  CHECK(aperiodic_templates(9).size() == 148);
  CHECK(berlekamp_massey(bits_of("1101011110001")) == 4);
  CHECK(berlekamp_massey(bits_of("0000")) == 0);
}

TEST_CASE("overlapping template statistic from published class counts") {
  // χ² of ν = (329, 164, 150, 111, 78, 136) over N = 968 blocks.
  const std::array<double, 6> probs{0.364091, 0.185659, 0.139381, 0.100571, 0.070432, 0.139865};
  const std::array<double, 6> nu{329, 164, 150, 111, 78, 136};
  double chi2 = 0.0;
  for (int i = 0; i < 6; ++i) chi2 += (nu[i] - 968 * probs[i]) * (nu[i] - 968 * probs[i]) / (968 * probs[i]);
  CHECK(chi2 == doctest::Approx(7.949746531).epsilon(1e-8));
  CHECK(igamc(2.5, chi2 / 2) == doctest::Approx(0.159027028).epsilon(1e-8));
}

TEST_CASE("degenerate strings are rejected") {
  const std::vector<std::uint8_t> ones(100'000, 1);
  CHECK(frequency_monobit(ones).p_value < 1e-6);
  CHECK(runs(ones).p_value < 1e-6);

  std::vector<std::uint8_t> alternating(1'000'000);
  for (std::size_t i = 0; i < alternating.size(); ++i) alternating[i] = std::uint8_t(i & 1);
  CHECK(frequency_monobit(alternating).p_value == 1.0);
  CHECK(serial(alternating, 16)[0].p_value < 1e-6);
  const std::vector<std::uint8_t> short_alt(alternating.begin(), alternating.begin() + 100'000);
  CHECK(serial(short_alt, 13)[0].p_value < 1e-6);

  CHECK_THROWS_AS(frequency_monobit(std::vector<std::uint8_t>{0, 1, 2}), InputError);
  CHECK_THROWS_AS(frequency_monobit({}), InsufficientDataError);
  CHECK_THROWS_AS(dft_spectral(bits_of("0101")), InsufficientDataError);
  CHECK_THROWS_AS(serial(bits_of("0101"), 1), ParameterError);
}

TEST_CASE("simulated biased source fails monobit") {
  ExperimentConfig c = reference_config();
  c.pair_rate_hz = 1e5;
  c.efficiency_A = c.efficiency_B0 = c.efficiency_B1 = 1.0;
  c.jitter_ps = 0.0;
  c.duration_s = 10.0;
  const BitString b = extract_bits(simulate(c), {});
  REQUIRE(b.bits.size() >= 990'000);
  const std::span<const std::uint8_t> first(b.bits.data(), 990'000);
  const TestReport report = run_suite(first);
  const auto it = std::find_if(report.records.begin(), report.records.end(),
                               [](const TestRecord& r) { return r.name == "frequency_monobit"; });
  REQUIRE(it != report.records.end());
  CHECK(*it->p_value < 1e-6);
  CHECK_FALSE(it->pass);
  CHECK_FALSE(report.all_passed());
  const auto failed = report.failed_tests();
  CHECK(std::find(failed.begin(), failed.end(), "frequency_monobit") != failed.end());
}

TEST_CASE("suite records, skipping and serialization") {
  std::mt19937_64 rng(4);
  const auto bits = random_bits(rng, 20'000);
  const TestReport core = run_suite(bits);
  CHECK(core.records.size() == 10);
  CHECK(core.executed_count == 10);
  for (const auto& r : core.records) {
    REQUIRE(r.p_value);
    CHECK(*r.p_value >= 0.0);
    CHECK(*r.p_value <= 1.0);
    CHECK(r.pass == (*r.p_value >= core.alpha));
  }

  const TestReport full = run_suite(bits, 0.01, Suite::full);
  std::size_t skipped = 0;
  for (const auto& r : full.records)
    if (r.skipped) {
      ++skipped;
      CHECK_FALSE(r.p_value);
      CHECK_FALSE(r.note.empty());
    }
  CHECK(skipped > 0);  // excursions need a million bits
  CHECK(full.executed_count + skipped == full.records.size());

  const TestReport tiny = run_suite(bits_of("0110100110"));
  CHECK(tiny.executed_count == 0);
  CHECK(tiny.all_passed());

  const auto j = to_json(full);
  const TestReport back = report_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(j["records"].size() == full.records.size());
  CHECK_THROWS_AS(report_from_json(nlohmann::json{{"alpha", 0.01}}), ParameterError);

  const std::string table = format_table(core);
  CHECK(table.find("cumulative_sums[forward]") != std::string::npos);
  CHECK(table.find("passed at alpha = 0.01") != std::string::npos);

  CHECK_THROWS_AS(run_suite(bits, 0.0), ParameterError);
  CHECK_THROWS_AS(parse_suite("extended"), ParameterError);
}

TEST_CASE("identical input gives an identical report") {
  std::mt19937_64 rng(6);
  const auto bits = random_bits(rng, 1'000'000);
  SuiteOptions parallel;
  parallel.parallel = true;
  const auto a = to_json(run_suite(bits, 0.01, Suite::full));
  CHECK(to_json(run_suite(bits, 0.01, Suite::full)) == a);
  CHECK(to_json(run_suite(bits, 0.01, Suite::full, parallel)) == a);
}

TEST_CASE("p-values of good random input are uniform") {
  std::mt19937_64 rng(20240601);
  const int strings = 1000;
  std::map<std::string, std::vector<double>> pvals;
  for (int s = 0; s < strings; ++s) {
    const auto bits = random_bits(rng, 100'000);
    for (const auto& r : run_suite(bits).records) {
      REQUIRE(r.p_value);
      pvals[r.variant.empty() ? r.name : r.name + "[" + r.variant + "]"].push_back(*r.p_value);
    }
  }
  CHECK(pvals.size() == 10);
  for (const auto& [name, ps] : pvals) {
    INFO(name);
    const auto passed = std::count_if(ps.begin(), ps.end(), [](double p) { return p >= 0.01; });
    CHECK(passed >= 980);
    std::array<int, 10> bins{};
    for (double p : ps) ++bins[std::min(9, int(p * 10))];
    double chi2 = 0.0;
    for (int b : bins) chi2 += (b - 100.0) * (b - 100.0) / 100.0;
    CHECK(igamc(4.5, chi2 / 2) > 0.001);
  }
}
