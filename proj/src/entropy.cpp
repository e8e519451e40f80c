#include "qrng/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qrng/coincidence.hpp"
#include "qrng/error.hpp"

namespace qrng {

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ParameterError("probability vector is empty");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("probabilities must lie in [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ParameterError("probabilities sum to " + std::to_string(total) + ", not 1");
}

double self_information(double p, int base) {
  if (base < 2) throw ParameterError("logarithm base must be at least 2");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("probability must lie in [0, 1]");
  if (p == 0.0) return std::numeric_limits<double>::infinity();
  // -log(1) is -0.0; report a plain zero for the certain event.
  if (p == 1.0) return 0.0;
  return -std::log(p) / std::log(double(base));
}

double shannon_entropy(const ProbabilityVector& pv) {
  double h = 0.0;
  for (double p : pv.probs())
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double min_entropy(const ProbabilityVector& pv) {
  const auto probs = pv.probs();
  const double h = -std::log2(*std::max_element(probs.begin(), probs.end()));
  return h == 0.0 ? 0.0 : h;
}

BiasEstimate estimate_bias(std::uint64_t n0, std::uint64_t n1) {
  if (n0 == 0 || n1 == 0)
    throw DegenerateInputError("bias estimation needs both outcomes (n0 = " + std::to_string(n0) +
                               ", n1 = " + std::to_string(n1) + ")");
  BiasEstimate e;
  e.n0 = n0;
  e.n1 = n1;
  const double n = double(n0) + double(n1);
  const double p = double(n0) / n;
  const double sigma_p = std::sqrt(p * (1.0 - p) / n);
  const double p_max = std::max(p, 1.0 - p);

  e.R_hat = double(n0) / double(n1);
  e.R_sigma = sigma_p / ((1.0 - p) * (1.0 - p));
  e.Hmin_hat = -std::log2(p_max);
  e.Hmin_sigma = sigma_p / (p_max * std::numbers::ln2);
  e.H_shannon = shannon_entropy(ProbabilityVector({p, 1.0 - p}));
  return e;
}

BiasEstimate estimate_bias(const BitString& bits) {
  return estimate_bias(bits.n_coincidences_0, bits.n_coincidences_1);
}

nlohmann::json to_json(const BiasEstimate& e) {
  return {{"n0", e.n0},
          {"n1", e.n1},
          {"R_hat", e.R_hat},
          {"R_sigma", e.R_sigma},
          {"H_shannon", e.H_shannon},
          {"H_min", e.Hmin_hat},
          {"H_min_sigma", e.Hmin_sigma}};
}

}  // namespace qrng
