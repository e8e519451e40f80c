#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace qrng {

/// Probability spectrum |C_l|^2 of the down-converted pair over azimuthal
/// indices l in [-l_max, +l_max]. Radial index is fixed at p = 0.
///
/// Spectra built by gaussian_spectrum() are normalized, symmetric in l and
/// non-increasing in |l|. Imported spectra are only guaranteed normalized
/// and non-negative.
class SpiralSpectrum {
 public:
  /// Normalizes `weights` (one per l, ordered from -l_max to +l_max).
  /// Throws ParameterError on negative or all-zero weights or an even count.
  SpiralSpectrum(std::vector<double> weights, double sigma);

  int l_max() const noexcept { return l_max_; }
  double sigma() const noexcept { return sigma_; }
  std::span<const double> weights() const noexcept { return weights_; }
  bool contains(int l) const noexcept { return l >= -l_max_ && l <= l_max_; }

  /// Weight of mode l. Throws RangeError outside the spectrum.
  double weight(int l) const;

 private:
  std::vector<double> weights_;
  int l_max_;
  double sigma_;
};

/// Gaussian spiral bandwidth, weights ∝ exp(-l^2 / (2 sigma^2)).
/// Requires l_max >= 6 sigma so the truncated tail stays below 1e-6.
SpiralSpectrum gaussian_spectrum(double sigma, int l_max);

/// Standard deviation that yields the given full width at half maximum.
double sigma_from_fwhm(double fwhm);

/// Default spectrum width: FWHM of 19 modes.
inline constexpr double kDefaultSpectrumFwhm = 19.0;

/// Probability of a joint projection onto (l_A, l_B).
///
/// With crosstalk c the ideal anti-correlation is blurred by a unit-width
/// Gaussian g in (l_A + l_B):
///   P = w[l_B] * ((1 - c) * delta(l_A, -l_B) + c * g(l_A + l_B)).
double joint_projection_probability(const SpiralSpectrum& spec, int l_a, int l_b,
                                    double crosstalk);

/// Sum of joint_projection_probability over every l_A in the spectrum.
double marginal_projection_weight(const SpiralSpectrum& spec, int l_b, double crosstalk);

/// Sum of joint_projection_probability over every l_B in the spectrum, i.e.
/// the probability that a projection onto l_A in the herald arm passes.
double herald_projection_weight(const SpiralSpectrum& spec, int l_a, double crosstalk);

/// Two-column text format: "l weight" per line, '#' starts a comment.
/// Rows must cover a contiguous symmetric range of l.
SpiralSpectrum read_spectrum(const std::filesystem::path& path);
void write_spectrum(const SpiralSpectrum& spec, const std::filesystem::path& path);

}  // namespace qrng
