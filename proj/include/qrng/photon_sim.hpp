#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qrng/hologram.hpp"
#include "qrng/spdc_model.hpp"
#include "qrng/time_tags.hpp"

namespace qrng {

/// OAM projections applied by the modulators. Arm B0 and B1 are projected
/// onto l_B0 and l_B1; if `l_A` is set the herald arm is projected too
/// (spiral bandwidth scans), otherwise it heralds through a multi-mode fibre.
struct Projection {
  int l_B0 = 0;
  int l_B1 = 0;
  std::optional<int> l_A;
  SpiralSpectrum spectrum = gaussian_spectrum(sigma_from_fwhm(kDefaultSpectrumFwhm), 50);
  double crosstalk = 0.0;
};

struct ExperimentConfig {
  double pair_rate_hz = 0.0;
  double duration_s = 1.0;
  double efficiency_A = 1.0;
  double efficiency_B0 = 1.0;
  double efficiency_B1 = 1.0;
  std::array<double, kChannelCount> dark_rate_hz{};  // indexed by Channel
  double jitter_ps = 0.0;                            // Gaussian 1σ per detection
  double dead_time_ps = 0.0;
  SplitterConfig splitter;
  std::optional<Projection> projection;
  std::uint64_t seed = 0;

  /// Throws ParameterError / RangeError on an invalid configuration.
  void validate() const;
};

/// Runs longer than this overflow the signed picosecond arithmetic.
inline constexpr double kMaxDurationS = 5.0e6;

/// Per-pair probabilities of each detection pattern. Patterns are disjoint;
/// the remainder (1 - sum) is "nothing detected".
struct PairOutcomes {
  double coincidence_B0 = 0.0;  // A and B0 detected
  double coincidence_B1 = 0.0;  // A and B1 detected
  double only_A = 0.0;
  double only_B0 = 0.0;
  double only_B1 = 0.0;

  double any() const { return coincidence_B0 + coincidence_B1 + only_A + only_B0 + only_B1; }
};

/// Detection-pattern probabilities implied by the configuration's routing,
/// grating efficiencies, projections and detector efficiencies.
PairOutcomes pair_outcomes(const ExperimentConfig& config);

/// Generates a sorted, time-tagged detection stream. Identical configs
/// (including seed) produce identical streams.
std::vector<TimeTagEvent> simulate(const ExperimentConfig& config);

/// The uncorrected desk experiment (R = 0.8518, both depths 1) with a
/// coincidence bit rate of about 24 kHz: 400 kHz pairs, 20 % herald
/// efficiency, 30 % per B arm, 100 Hz dark counts, 350 ps jitter.
ExperimentConfig reference_config();

}  // namespace qrng
