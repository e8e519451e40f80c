#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qrng/photon_sim.hpp"

namespace qrng {

/// Closed integer interval [lo, hi].
struct ScanRange {
  int lo = 0;
  int hi = 0;

  int size() const noexcept { return hi - lo + 1; }
  bool contains(int l) const noexcept { return l >= lo && l <= hi; }
  /// Throws ParameterError if hi < lo.
  void validate() const;
};

enum class Arm { B0 = 0, B1 = 1 };

/// Coincidence counts of a spiral bandwidth scan, indexed by (arm, l_B, l_A).
class SpiralBandwidthData {
 public:
  SpiralBandwidthData(ScanRange l_b, ScanRange l_a, double acquisition_s);

  const ScanRange& l_b_range() const noexcept { return l_b_; }
  const ScanRange& l_a_range() const noexcept { return l_a_; }
  double acquisition_s() const noexcept { return acquisition_s_; }

  /// Throw RangeError outside the scanned ranges.
  std::uint64_t count(Arm arm, int l_b, int l_a) const;
  void set_count(Arm arm, int l_b, int l_a, std::uint64_t n);

  /// Counts of one arm summed over the herald index.
  std::uint64_t arm_total(Arm arm, int l_b) const;

 private:
  std::size_t index(Arm arm, int l_b, int l_a) const;

  ScanRange l_b_;
  ScanRange l_a_;
  double acquisition_s_;
  std::vector<std::uint64_t> counts_;
};

/// Runs one simulation + extraction per (l_A, l_B) grid point with both B
/// arms projected onto l_B and the herald projected onto l_A. Each point is
/// seeded from config.seed and its grid index, so results do not depend on
/// `threads`. The coincidence window is the default 25 ns.
SpiralBandwidthData measure_spiral_bandwidth(const ExperimentConfig& config, ScanRange l_range,
                                             double dwell_s, unsigned threads = 1);

/// Conditional outcome probabilities for projections (l_B0, l_B1), with the
/// herald index traced out. Throws RangeError outside the scan and
/// DegenerateInputError if both arms recorded nothing.
PathProbabilities conditional_probabilities(const SpiralBandwidthData& data, int l_b0, int l_b1);

struct OamSurfacePoint {
  int l_B0 = 0;
  int l_B1 = 0;
  double p0_given = 0.0;
  double hmin = 0.0;
  double normalized_rate = 0.0;
  std::uint64_t n0 = 0;  // B0 counts behind the estimate
  std::uint64_t n1 = 0;
};

/// Min-entropy and relative bit rate over every (l_B0, l_B1) pair in the
/// ranges, l_B0 major. Rates are normalized by the largest pair in the scan.
std::vector<OamSurfacePoint> entropy_rate_surface(const SpiralBandwidthData& data, ScanRange l_b0_range,
                                                  ScanRange l_b1_range);

/// Counts along the anti-diagonal l_A = -l_B for one arm, divided by that
/// arm's maximum over the whole grid.
std::vector<double> normalized_diagonal(const SpiralBandwidthData& data, Arm arm);

/// FWHM of a Gaussian fitted to one arm's anti-diagonal counts. The fit is a
/// count-weighted parabola in log(counts); empty cells are skipped. Throws
/// DegenerateInputError with fewer than three non-empty cells or no peak.
double diagonal_fwhm(const SpiralBandwidthData& data, Arm arm);

/// Closed-form p(0 | l_B0, l_B1) for a balanced splitter.
double predicted_p0(const SpiralSpectrum& spec, int l_b0, int l_b1, double crosstalk = 0.0);

/// Projection l_B1 in [-l_range, l_range] whose predicted p0 is closest to
/// the target; ties prefer smaller |l_B1|, then positive. Throws
/// UnachievableTargetError if the target lies outside the achievable span.
int tailor_bias(const SpiralSpectrum& spec, double target_p0, int l_b0, int l_range = 20,
                double crosstalk = 0.0);

/// Columns: arm,l_B,l_A,counts,normalized (per-arm maximum).
void write_spiral_csv(const SpiralBandwidthData& data, const std::filesystem::path& path);
/// Columns: l_B0,l_B1,p0,hmin,normalized_rate.
void write_surface_csv(const std::vector<OamSurfacePoint>& surface, const std::filesystem::path& path);

}  // namespace qrng
