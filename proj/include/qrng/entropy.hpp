#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace qrng {

struct BitString;

/// Discrete distribution; entries in [0, 1] summing to 1 within 1e-9.
class ProbabilityVector {
 public:
  /// Throws ParameterError if the entries are not a distribution.
  explicit ProbabilityVector(std::vector<double> probs);

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

/// -log_b(p). Returns +infinity for p = 0 (an impossible event carries
/// unbounded information); throws ParameterError outside [0, 1] or for b < 2.
double self_information(double p, int base = 2);

/// -Σ p log2 p with 0 log 0 = 0.
double shannon_entropy(const ProbabilityVector& pv);

/// -log2 max p.
double min_entropy(const ProbabilityVector& pv);

/// Bias of a binary source estimated from counts, with binomial (Wald)
/// standard errors.
struct BiasEstimate {
  std::uint64_t n0 = 0;
  std::uint64_t n1 = 0;
  double R_hat = 0.0;       // n0 / n1
  double R_sigma = 0.0;
  double Hmin_hat = 0.0;    // bits
  double Hmin_sigma = 0.0;  // bits
  double H_shannon = 0.0;   // bits, plug-in estimate
};

/// Throws DegenerateInputError if either count is zero.
BiasEstimate estimate_bias(std::uint64_t n0, std::uint64_t n1);
BiasEstimate estimate_bias(const BitString& bits);

/// {n0, n1, R_hat, R_sigma, H_shannon, H_min, H_min_sigma}
nlohmann::json to_json(const BiasEstimate& e);

}  // namespace qrng
