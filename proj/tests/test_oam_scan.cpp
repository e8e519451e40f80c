#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "qrng/coincidence.hpp"
#include "qrng/error.hpp"
#include "qrng/oam_scan.hpp"

using namespace qrng;
namespace fs = std::filesystem;

namespace {

constexpr double kSigma = 8.069;

ExperimentConfig scan_config(std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.pair_rate_hz = 2e6;
  c.seed = seed;
  c.projection = Projection{};
  c.projection->spectrum = gaussian_spectrum(kSigma, 50);
  return c;
}

double hmin_of(double p0) { return -std::log2(std::max(p0, 1.0 - p0)); }

}  // namespace

TEST_CASE("zero dwell gives an all-zero grid") {
  const auto data = measure_spiral_bandwidth(scan_config(), {-3, 3}, 0.0);
  for (Arm arm : {Arm::B0, Arm::B1})
    for (int b = -3; b <= 3; ++b)
      for (int a = -3; a <= 3; ++a) CHECK(data.count(arm, b, a) == 0);
  CHECK_THROWS_AS(conditional_probabilities(data, 0, 0), DegenerateInputError);
}

TEST_CASE("without crosstalk true coincidences sit on the anti-diagonal") {
  // At a low pair rate accidental coincidences are negligible.
  ExperimentConfig low = scan_config();
  low.pair_rate_hz = 1e3;
  const auto data = measure_spiral_bandwidth(low, {-4, 4}, 2.0);
  for (Arm arm : {Arm::B0, Arm::B1})
    for (int b = -4; b <= 4; ++b)
      for (int a = -4; a <= 4; ++a) {
        if (a == -b)
          CHECK(data.count(arm, b, a) > 0);
        else
          CHECK(data.count(arm, b, a) == 0);
      }
  CHECK(data.arm_total(Arm::B0, 2) == data.count(Arm::B0, 2, -2));
  CHECK_THROWS_AS(data.count(Arm::B0, 5, 0), RangeError);
  CHECK_THROWS_AS(conditional_probabilities(data, 0, 5), RangeError);
}

TEST_CASE("off-diagonal counts match the accidental rate") {
  const ExperimentConfig c = scan_config();
  const double dwell = 0.02;
  const auto data = measure_spiral_bandwidth(c, {-4, 4}, dwell);
  const auto& spec = c.projection->spectrum;
  double expected = 0.0, observed = 0.0;
  for (int b = -4; b <= 4; ++b)
    for (int a = -4; a <= 4; ++a) {
      if (a == -b) continue;
      // Balanced splitter: each arm receives half of the projected B light.
      const double singles_a = c.pair_rate_hz * spec.weight(a);
      const double singles_b = 0.5 * c.pair_rate_hz * spec.weight(b);
      expected += 2 * accidental_rate(singles_a, singles_b, kDefaultWindowPs) * dwell;
      observed += double(data.count(Arm::B0, b, a) + data.count(Arm::B1, b, a));
    }
  CHECK(expected > 100.0);
  CHECK(std::abs(observed - expected) <= 5.0 * std::sqrt(expected) + 0.05 * expected);
}

TEST_CASE("crosstalk spreads counts off the diagonal") {
  ExperimentConfig c = scan_config();
  c.projection->crosstalk = 0.3;
  const auto data = measure_spiral_bandwidth(c, {-2, 2}, 0.02);
  CHECK(data.count(Arm::B0, 1, 1) > 0);
  CHECK(data.count(Arm::B0, 1, -1) > data.count(Arm::B0, 1, 1));
}

TEST_CASE("scan results do not depend on the thread count") {
  const auto one = measure_spiral_bandwidth(scan_config(3), {-2, 2}, 0.01, 1);
  const auto four = measure_spiral_bandwidth(scan_config(3), {-2, 2}, 0.01, 4);
  for (Arm arm : {Arm::B0, Arm::B1})
    for (int b = -2; b <= 2; ++b)
      for (int a = -2; a <= 2; ++a) CHECK(one.count(arm, b, a) == four.count(arm, b, a));
}

TEST_CASE("gaussian ratio oracle at (0, 10)") {
  const auto spec = gaussian_spectrum(kSigma, 50);
  const double predicted = predicted_p0(spec, 0, 10);
  CHECK(predicted == doctest::Approx(0.6830764).epsilon(1e-6));
  CHECK(hmin_of(predicted) == doctest::Approx(0.5498812).epsilon(1e-6));
  CHECK(predicted_p0(spec, 4, -4) == 0.5);

  const auto data = measure_spiral_bandwidth(scan_config(7), {-10, 10}, 0.3);
  const auto p = conditional_probabilities(data, 0, 10);
  CHECK(std::abs(p.p0 - 0.683) <= 0.01);
  CHECK(std::abs(hmin_of(p.p0) - 0.550) <= 0.02);
  CHECK(p.p0 + p.p1 == doctest::Approx(1.0));
}

TEST_CASE("surface symmetry, bounds and normalization") {
  const auto data = measure_spiral_bandwidth(scan_config(11), {-5, 5}, 0.05);
  const auto surface = entropy_rate_surface(data, {-5, 5}, {-5, 5});
  REQUIRE(surface.size() == 121);
  double peak = 0.0;
  for (const auto& pt : surface) {
    CHECK(pt.hmin <= 1.0);
    CHECK(pt.hmin == doctest::Approx(hmin_of(pt.p0_given)));
    CHECK(pt.normalized_rate <= 1.0);
    peak = std::max(peak, pt.normalized_rate);
    // Swapping the projections swaps the outcomes, up to counting noise.
    const auto swapped = conditional_probabilities(data, pt.l_B1, pt.l_B0);
    const double n = double(pt.n0 + pt.n1);
    const double sigma = std::sqrt(2.0 * pt.p0_given * (1.0 - pt.p0_given) / n);
    CHECK(std::abs(swapped.p0 - (1.0 - pt.p0_given)) <= 4.0 * sigma + 1e-12);
    if (pt.l_B0 == pt.l_B1) CHECK(swapped.p0 == doctest::Approx(pt.p0_given));
  }
  CHECK(peak == 1.0);
  const auto& first = surface.front();
  CHECK(first.l_B0 == -5);
  CHECK(first.l_B1 == -5);
}

TEST_CASE("closed-form prediction is exchange symmetric") {
  const auto spec = gaussian_spectrum(kSigma, 50);
  for (int a = -20; a <= 20; a += 3)
    for (int b = -20; b <= 20; b += 2) {
      CHECK(predicted_p0(spec, a, b) == doctest::Approx(1.0 - predicted_p0(spec, b, a)));
      CHECK(hmin_of(predicted_p0(spec, a, b)) == doctest::Approx(hmin_of(predicted_p0(spec, b, a))));
      CHECK(predicted_p0(spec, a, b, 0.2) == doctest::Approx(1.0 - predicted_p0(spec, b, a, 0.2)));
    }
}

TEST_CASE("estimated min-entropy converges to the prediction") {
  const auto spec = gaussian_spectrum(kSigma, 50);
  std::vector<double> rms;
  for (double dwell : {0.002, 0.008, 0.032}) {
    double sq = 0.0;
    int n = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto data = measure_spiral_bandwidth(scan_config(100 + seed), {-3, 3}, dwell);
      for (const auto& pt : entropy_rate_surface(data, {-3, 3}, {-3, 3})) {
        const double d = pt.p0_given - predicted_p0(spec, pt.l_B0, pt.l_B1);
        sq += d * d;
        ++n;
      }
    }
    rms.push_back(std::sqrt(sq / n));
  }
  // Fourfold dwell, fourfold counts: the error should halve.
  CHECK(rms[0] / rms[1] == doctest::Approx(2.0).epsilon(0.35));
  CHECK(rms[1] / rms[2] == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("diagonal fit recovers the spectrum width") {
  const auto data = measure_spiral_bandwidth(scan_config(5), {-20, 20}, 0.02);
  // Only diagonal cells are non-empty, so this is cheap even at full range.
  for (Arm arm : {Arm::B0, Arm::B1}) CHECK(std::abs(diagonal_fwhm(data, arm) - 19.0) <= 1.0);
  const auto diag = normalized_diagonal(data, Arm::B0);
  REQUIRE(diag.size() == 41);
  CHECK(*std::max_element(diag.begin(), diag.end()) == 1.0);

  const auto empty = measure_spiral_bandwidth(scan_config(), {-2, 2}, 0.0);
  CHECK_THROWS_AS(diagonal_fwhm(empty, Arm::B0), DegenerateInputError);
}

TEST_CASE("bias tailoring") {
  const auto spec = gaussian_spectrum(kSigma, 50);
  CHECK(std::abs(tailor_bias(spec, 0.5, 4)) == 4);
  CHECK(std::abs(tailor_bias(spec, 0.683, 0)) == 10);
  try {
    tailor_bias(spec, 0.999, 0);
    FAIL("expected an unachievable target");
  } catch (const UnachievableTargetError& e) {
    CHECK(e.achievable_max() == doctest::Approx(0.9557137).epsilon(1e-6));
    CHECK(e.achievable_min() > 0.0);
  }
  CHECK_THROWS_AS(tailor_bias(spec, 1.0, 0), ParameterError);
  CHECK_THROWS_AS(tailor_bias(spec, 0.5, 0, 60), RangeError);
}

TEST_CASE("csv outputs") {
  const fs::path dir = fs::temp_directory_path() / "qrng_scan_test";
  fs::create_directories(dir);
  const auto data = measure_spiral_bandwidth(scan_config(), {-1, 1}, 0.01);
  write_spiral_csv(data, dir / "spiral.csv");
  write_surface_csv(entropy_rate_surface(data, {-1, 1}, {-1, 1}), dir / "surface.csv");
  std::ifstream spiral(dir / "spiral.csv"), surface(dir / "surface.csv");
  std::string header;
  std::getline(spiral, header);
  CHECK(header == "arm,l_B,l_A,counts,normalized");
  std::getline(surface, header);
  CHECK(header == "l_B0,l_B1,p0,hmin,normalized_rate");
  int rows = 0;
  for (std::string line; std::getline(surface, line);) ++rows;
  CHECK(rows == 9);
  fs::remove_all(dir);
  CHECK_THROWS_AS((ScanRange{2, 1}.validate()), ParameterError);
  CHECK_THROWS_AS(measure_spiral_bandwidth(scan_config(), {-60, 60}, 1.0), RangeError);
}
