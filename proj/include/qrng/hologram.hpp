#pragma once

#include <string>

#include <json.hpp>

namespace qrng {

inline constexpr int kDefaultGreyLevels = 256;

/// Two juxtaposed gratings on the B-arm modulator. R = p0 / p1 is the bias of
/// the uncorrected system; the depths scale each grating's phase range.
struct SplitterConfig {
  double bias_ratio_R = 1.0;
  double depth_M0 = 1.0;
  double depth_M1 = 1.0;
  int grey_levels = kDefaultGreyLevels;

  /// Throws ParameterError if any field violates its domain.
  void validate() const;

  /// Copy with both depths snapped to the modulator's grey-level grid.
  SplitterConfig quantized() const;
};

/// Outcome probabilities of the B photon after grating attenuation,
/// conditioned on the photon leaving the splitter in a first order.
struct PathProbabilities {
  double p0;
  double p1;
};

/// Fraction of power in diffraction order n for a grating of depth M:
/// sinc^2(pi (n - M)).
double diffraction_efficiency(int order_n, double depth_M);

/// Renormalized path probabilities when only arm B1 is attenuated.
PathProbabilities rebalanced_probabilities(double R, double depth_M1);

/// General form with both arms attenuated: p0 ∝ R·eff(M0), p1 ∝ eff(M1).
PathProbabilities rebalanced_probabilities(const SplitterConfig& splitter);

/// Min-entropy (bits) of the rebalanced source.
double min_entropy_surface(double R, double depth_M1);

/// Depth M in [0, 1] with sinc^2(pi (1 - M)) == R, found by bisection.
/// Requires 0 < R <= 1; for R > 1 the roles of the arms must be swapped
/// (ArmRoleError).
double solve_balance_depth(double R);

/// Nearest multiple of 1/grey_levels; ties round up.
double quantize_depth(double depth_M, int grey_levels);

/// One-sided derivative dH_min/dM taken from below M, step 1e-6. H_min has a
/// kink at the balance point, so the slope belongs to whichever branch is
/// active just below M.
double entropy_slope_below(double R, double depth_M);

/// Min-entropy uncertainty caused by the modulator's depth resolution:
/// (1 / grey_levels) * |dH_min/dM|.
double quantized_entropy_error(double R, double depth_M, int grey_levels);

/// Result of a balance calibration.
struct Calibration {
  double R = 1.0;
  std::string attenuated_arm = "B1";  // the favoured arm
  double M_star = 1.0;
  double M_quantized = 1.0;
  double H_min_predicted = 1.0;  // at the quantized depth
  double dH_min = 0.0;           // quantization error at M_star
  int grey_levels = kDefaultGreyLevels;

  /// Splitter that applies this calibration.
  SplitterConfig splitter() const;
};

/// Solves for the depth that balances bias R. When R > 1 arm B0 is the
/// favoured arm and is attenuated instead (solving for 1/R).
Calibration calibrate(double R, int grey_levels = kDefaultGreyLevels);

nlohmann::json to_json(const Calibration& c);
Calibration calibration_from_json(const nlohmann::json& j);

}  // namespace qrng
