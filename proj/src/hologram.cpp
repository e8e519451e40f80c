#include "qrng/hologram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qrng/error.hpp"

namespace qrng {
namespace {

constexpr double kSlopeStep = 1e-6;
constexpr double kBalanceTolerance = 1e-12;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void check_depth(double depth_M) {
  if (!(depth_M >= 0.0 && depth_M <= 1.0))
    throw ParameterError("grating depth must lie in [0, 1], got " + std::to_string(depth_M));
}

void check_ratio(double R) {
  if (!(R > 0.0) || !std::isfinite(R))
    throw ParameterError("bias ratio R must be positive, got " + std::to_string(R));
}

void check_levels(int grey_levels) {
  if (grey_levels <= 0) throw ParameterError("grey_levels must be positive");
}

// H_min as a function of depth, without re-validating inside the
// finite-difference loop.
double hmin_unchecked(double R, double depth_M1) {
  const double s = diffraction_efficiency(1, depth_M1);
  const double p0 = R / (R + s);
  return -std::log2(std::max(p0, 1.0 - p0));
}

}  // namespace

void SplitterConfig::validate() const {
  check_ratio(bias_ratio_R);
  check_depth(depth_M0);
  check_depth(depth_M1);
  check_levels(grey_levels);
}

SplitterConfig SplitterConfig::quantized() const {
  validate();
  SplitterConfig q = *this;
  q.depth_M0 = quantize_depth(depth_M0, grey_levels);
  q.depth_M1 = quantize_depth(depth_M1, grey_levels);
  return q;
}

double diffraction_efficiency(int order_n, double depth_M) {
  check_depth(depth_M);
  const double s = sinc(std::numbers::pi * (double(order_n) - depth_M));
  return s * s;
}

PathProbabilities rebalanced_probabilities(double R, double depth_M1) {
  check_ratio(R);
  const double s = diffraction_efficiency(1, depth_M1);
  const double p1 = s / (R + s);
  return {1.0 - p1, p1};
}

PathProbabilities rebalanced_probabilities(const SplitterConfig& splitter) {
  splitter.validate();
  const double w0 = splitter.bias_ratio_R * diffraction_efficiency(1, splitter.depth_M0);
  const double w1 = diffraction_efficiency(1, splitter.depth_M1);
  if (w0 + w1 <= 0.0) throw ParameterError("both gratings have zero first-order efficiency");
  const double p1 = w1 / (w0 + w1);
  return {1.0 - p1, p1};
}

double min_entropy_surface(double R, double depth_M1) {
  const auto [p0, p1] = rebalanced_probabilities(R, depth_M1);
  return -std::log2(std::max(p0, p1));
}

double solve_balance_depth(double R) {
  check_ratio(R);
  if (R > 1.0)
    throw ArmRoleError("R = " + std::to_string(R) +
                       " > 1 favours arm B0; invert R and attenuate B0 instead");
  if (R == 1.0) return 1.0;

  // sinc^2(pi (1 - M)) rises monotonically from 0 at M = 0 to 1 at M = 1.
  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double f = diffraction_efficiency(1, mid) - R;
    if (std::abs(f) < kBalanceTolerance || hi - lo < 1e-16) break;
    (f < 0.0 ? lo : hi) = mid;
  }
  return mid;
}

double quantize_depth(double depth_M, int grey_levels) {
  check_depth(depth_M);
  check_levels(grey_levels);
  const double steps = std::floor(depth_M * grey_levels + 0.5);
  return std::min(steps, double(grey_levels)) / grey_levels;
}

double entropy_slope_below(double R, double depth_M) {
  check_ratio(R);
  check_depth(depth_M);
  if (depth_M < kSlopeStep)  // nothing below: fall back to the forward step
    return (hmin_unchecked(R, depth_M + kSlopeStep) - hmin_unchecked(R, depth_M)) / kSlopeStep;
  return (hmin_unchecked(R, depth_M) - hmin_unchecked(R, depth_M - kSlopeStep)) / kSlopeStep;
}

double quantized_entropy_error(double R, double depth_M, int grey_levels) {
  check_levels(grey_levels);
  return std::abs(entropy_slope_below(R, depth_M)) / grey_levels;
}

SplitterConfig Calibration::splitter() const {
  SplitterConfig s;
  s.grey_levels = grey_levels;
  s.bias_ratio_R = R;
  if (attenuated_arm == "B0")
    s.depth_M0 = M_quantized;
  else
    s.depth_M1 = M_quantized;
  return s;
}

Calibration calibrate(double R, int grey_levels) {
  check_ratio(R);
  check_levels(grey_levels);
  Calibration c;
  c.R = R;
  c.grey_levels = grey_levels;
  // Attenuating B0 by eff(M) with bias R is attenuating B1 with bias 1/R.
  const double effective_R = R > 1.0 ? 1.0 / R : R;
  c.attenuated_arm = R > 1.0 ? "B0" : "B1";
  c.M_star = solve_balance_depth(effective_R);
  c.M_quantized = quantize_depth(c.M_star, grey_levels);
  c.H_min_predicted = min_entropy_surface(effective_R, c.M_quantized);
  c.dH_min = quantized_entropy_error(effective_R, c.M_star, grey_levels);
  return c;
}

nlohmann::json to_json(const Calibration& c) {
  return {{"R", c.R},
          {"attenuated_arm", c.attenuated_arm},
          {"M_star", c.M_star},
          {"M_quantized", c.M_quantized},
          {"H_min_predicted", c.H_min_predicted},
          {"dH_min", c.dH_min},
          {"grey_levels", c.grey_levels}};
}

Calibration calibration_from_json(const nlohmann::json& j) {
  try {
    Calibration c;
    c.R = j.at("R").get<double>();
    c.M_star = j.at("M_star").get<double>();
    c.M_quantized = j.at("M_quantized").get<double>();
    c.H_min_predicted = j.at("H_min_predicted").get<double>();
    c.dH_min = j.at("dH_min").get<double>();
    c.attenuated_arm = j.value("attenuated_arm", std::string("B1"));
    c.grey_levels = j.value("grey_levels", kDefaultGreyLevels);
    if (c.attenuated_arm != "B0" && c.attenuated_arm != "B1")
      throw ParameterError("attenuated_arm must be B0 or B1");
    check_depth(c.M_quantized);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("calibration record: ") + e.what());
  }
}

}  // namespace qrng
