#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "qrng/coincidence.hpp"
#include "qrng/entropy.hpp"
#include "qrng/error.hpp"

using namespace qrng;

TEST_CASE("self-information") {
  CHECK(self_information(1.0) == 0.0);
  CHECK(self_information(0.5) == 1.0);
  CHECK(self_information(0.25 * 0.5) == doctest::Approx(self_information(0.25) + self_information(0.5)));
  CHECK(self_information(0.125) == doctest::Approx(3.0));
  CHECK(self_information(0.01, 10) == doctest::Approx(2.0));
  CHECK(self_information(0.0) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(self_information(1.5), ParameterError);
  CHECK_THROWS_AS(self_information(-0.1), ParameterError);
  CHECK_THROWS_AS(self_information(0.5, 1), ParameterError);
}

TEST_CASE("self-information never decreases as probability falls") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10'000; ++i) {
    double a = u(rng), b = u(rng);
    if (b > a) std::swap(a, b);
    CHECK(self_information(b) >= self_information(a));
  }
}

TEST_CASE("shannon and min-entropy values") {
  CHECK(shannon_entropy(ProbabilityVector({0.5, 0.5})) == 1.0);
  CHECK(shannon_entropy(ProbabilityVector({1.0, 0.0})) == 0.0);
  CHECK(shannon_entropy(ProbabilityVector({0.54, 0.46})) == doctest::Approx(0.99537).epsilon(1e-5));
  CHECK(std::abs(min_entropy(ProbabilityVector({0.54, 0.46})) - 0.8890) <= 0.0003);
  CHECK(min_entropy(ProbabilityVector({0.5, 0.5})) == 1.0);
  CHECK(min_entropy(ProbabilityVector({0.25, 0.25, 0.25, 0.25})) == 2.0);
  CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), ParameterError);
  CHECK_THROWS_AS(ProbabilityVector({1.2, -0.2}), ParameterError);
  CHECK_THROWS_AS(ProbabilityVector({}), ParameterError);
}

TEST_CASE("uniform distributions reach log2 d") {
  for (std::size_t d = 1; d <= 64; ++d) {
    const ProbabilityVector pv(std::vector<double>(d, 1.0 / double(d)));
    CHECK(shannon_entropy(pv) == doctest::Approx(std::log2(double(d))).epsilon(1e-12));
    CHECK(min_entropy(pv) == doctest::Approx(std::log2(double(d))).epsilon(1e-12));
  }
}

TEST_CASE("min-entropy bounds shannon entropy from below") {
  std::mt19937_64 rng(8);
  std::gamma_distribution<double> g(0.5, 1.0);
  for (int i = 0; i < 20'000; ++i) {
    std::vector<double> p(2 + rng() % 15);
    double total = 0.0;
    for (auto& x : p) total += (x = g(rng));
    for (auto& x : p) x /= total;
    const ProbabilityVector pv(p);
    CHECK(min_entropy(pv) <= shannon_entropy(pv) + 1e-12);
  }
}

TEST_CASE("bias estimate") {
  const BiasEstimate even = estimate_bias(500'000, 500'000);
  CHECK(even.R_hat == 1.0);
  CHECK(even.Hmin_hat == 1.0);
  CHECK(even.H_shannon == 1.0);
  CHECK(even.R_sigma > 0.0);
  CHECK_THROWS_AS(estimate_bias(10, 0), DegenerateInputError);
  CHECK_THROWS_AS(estimate_bias(0, 10), DegenerateInputError);

  BitString b;
  b.n_coincidences_0 = 3;
  b.n_coincidences_1 = 1;
  CHECK(estimate_bias(b).R_hat == 3.0);

  const auto j = to_json(estimate_bias(460, 540));
  for (const char* key : {"n0", "n1", "R_hat", "R_sigma", "H_shannon", "H_min", "H_min_sigma"})
    CHECK(j.contains(key));
  CHECK(j["n0"] == 460);
}

TEST_CASE("bias estimates cover the truth at the stated uncertainty") {
  const double p1 = 0.54;
  const double R = (1 - p1) / p1;
  const double H = -std::log2(p1);
  std::mt19937_64 rng(2718);
  std::binomial_distribution<std::uint64_t> draw(1'000'000, 1 - p1);
  int seeds = 300, r_ok = 0, h_ok = 0;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t n0 = draw(rng);
    const BiasEstimate e = estimate_bias(n0, 1'000'000 - n0);
    if (std::abs(e.R_hat - R) <= 3 * e.R_sigma) ++r_ok;
    if (std::abs(e.Hmin_hat - H) <= 3 * e.Hmin_sigma) ++h_ok;
  }
  CHECK(r_ok >= 0.99 * seeds);
  CHECK(h_ok >= 0.99 * seeds);
  CHECK(R == doctest::Approx(0.8519).epsilon(1e-4));
}

TEST_CASE("estimator error halves per fourfold sample") {
  const double p1 = 0.54;
  const double H = -std::log2(p1);
  std::mt19937_64 rng(31);
  std::vector<double> rms;
  for (std::uint64_t n : {10'000u, 40'000u, 160'000u}) {
    std::binomial_distribution<std::uint64_t> draw(n, 1 - p1);
    double sq = 0.0;
    const int seeds = 2000;
    for (int s = 0; s < seeds; ++s) {
      const std::uint64_t n0 = draw(rng);
      const double d = estimate_bias(n0, n - n0).Hmin_hat - H;
      sq += d * d;
    }
    rms.push_back(std::sqrt(sq / seeds));
  }
  CHECK(rms[0] / rms[1] == doctest::Approx(2.0).epsilon(0.1));
  CHECK(rms[1] / rms[2] == doctest::Approx(2.0).epsilon(0.1));
}
