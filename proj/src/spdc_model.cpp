#include "qrng/spdc_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "qrng/error.hpp"
#include "qrng/manifest.hpp"

namespace qrng {
namespace {

// Normalizer of exp(-k^2/2) summed over all integers k.
double crosstalk_normalizer() {
  static const double z = [] {
    double s = 0.0;
    for (int k = -40; k <= 40; ++k) s += std::exp(-0.5 * k * k);
    return s;
  }();
  return z;
}

double crosstalk_kernel(int offset) {
  return std::exp(-0.5 * double(offset) * double(offset)) / crosstalk_normalizer();
}

void check_crosstalk(double crosstalk) {
  if (!(crosstalk >= 0.0 && crosstalk < 1.0))
    throw ParameterError("crosstalk must lie in [0, 1)");
}

}  // namespace

SpiralSpectrum::SpiralSpectrum(std::vector<double> weights, double sigma)
    : weights_(std::move(weights)), l_max_(0), sigma_(sigma) {
  if (weights_.size() < 3 || weights_.size() % 2 == 0)
    throw ParameterError("spectrum needs an odd number (>= 3) of weights");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("spectrum weights must be finite and non-negative");
    total += w;
  }
  if (total <= 0.0) throw ParameterError("spectrum has zero total weight");
  for (double& w : weights_) w /= total;
  l_max_ = static_cast<int>(weights_.size() / 2);
}

double SpiralSpectrum::weight(int l) const {
  if (!contains(l))
    throw RangeError("OAM index " + std::to_string(l) + " outside spectrum range ±" +
                     std::to_string(l_max_));
  return weights_[static_cast<std::size_t>(l + l_max_)];
}

SpiralSpectrum gaussian_spectrum(double sigma, int l_max) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be positive");
  if (l_max < 1) throw ParameterError("l_max must be at least 1");
  if (double(l_max) < 6.0 * sigma)
    throw TruncationError("l_max = " + std::to_string(l_max) + " truncates a spectrum of sigma " +
                          std::to_string(sigma) + "; need l_max >= 6 sigma");

  std::vector<double> w(static_cast<std::size_t>(2 * l_max + 1));
  // Fill from the centre outwards so w[l] and w[-l] are the same double.
  for (int l = 0; l <= l_max; ++l) {
    const double v = std::exp(-double(l) * double(l) / (2.0 * sigma * sigma));
    w[static_cast<std::size_t>(l_max + l)] = v;
    w[static_cast<std::size_t>(l_max - l)] = v;
  }
  return SpiralSpectrum(std::move(w), sigma);
}

double sigma_from_fwhm(double fwhm) {
  if (!(fwhm > 0.0)) throw ParameterError("FWHM must be positive");
  return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

double joint_projection_probability(const SpiralSpectrum& spec, int l_a, int l_b,
                                    double crosstalk) {
  check_crosstalk(crosstalk);
  if (!spec.contains(l_a))
    throw RangeError("herald OAM index " + std::to_string(l_a) + " outside spectrum range");
  const double w = spec.weight(l_b);
  const double ideal = (l_a == -l_b) ? 1.0 - crosstalk : 0.0;
  const double blur = crosstalk > 0.0 ? crosstalk * crosstalk_kernel(l_a + l_b) : 0.0;
  return w * (ideal + blur);
}

double marginal_projection_weight(const SpiralSpectrum& spec, int l_b, double crosstalk) {
  check_crosstalk(crosstalk);
  const double w = spec.weight(l_b);
  if (crosstalk == 0.0) return w;  // -l_b is always inside a symmetric range
  double blur = 0.0;
  for (int l_a = -spec.l_max(); l_a <= spec.l_max(); ++l_a) blur += crosstalk_kernel(l_a + l_b);
  return w * ((1.0 - crosstalk) + crosstalk * blur);
}

double herald_projection_weight(const SpiralSpectrum& spec, int l_a, double crosstalk) {
  check_crosstalk(crosstalk);
  if (!spec.contains(l_a))
    throw RangeError("herald OAM index " + std::to_string(l_a) + " outside spectrum range");
  double total = 0.0;
  for (int l_b = -spec.l_max(); l_b <= spec.l_max(); ++l_b)
    total += joint_projection_probability(spec, l_a, l_b, crosstalk);
  return total;
}

SpiralSpectrum read_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spectrum file " + path.string());

  std::map<int, double> rows;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t line_offset = offset;
    offset += line.size() + 1;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    int l = 0;
    double w = 0.0;
    std::string extra;
    if (!(fields >> l >> w) || (fields >> extra))
      throw ParseError("expected two columns 'l weight' in " + path.string(), line_offset);
    if (!rows.emplace(l, w).second)
      throw ParseError("duplicate OAM index " + std::to_string(l), line_offset);
  }
  if (rows.empty()) throw ParseError("spectrum file is empty", 0);

  const int lo = rows.begin()->first;
  const int hi = rows.rbegin()->first;
  if (lo != -hi || rows.size() != static_cast<std::size_t>(hi - lo + 1))
    throw ParameterError("spectrum rows must cover a contiguous range -L..L");

  std::vector<double> weights;
  weights.reserve(rows.size());
  double mean_sq = 0.0;
  double total = 0.0;
  for (const auto& [l, w] : rows) {
    weights.push_back(w);
    mean_sq += w * double(l) * double(l);
    total += w;
  }
  // sigma is informational for imported spectra: the RMS width.
  const double sigma = total > 0.0 ? std::sqrt(mean_sq / total) : 0.0;
  return SpiralSpectrum(std::move(weights), sigma);
}

void write_spectrum(const SpiralSpectrum& spec, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "# l weight\n" << std::setprecision(17);
  for (int l = -spec.l_max(); l <= spec.l_max(); ++l) out << l << ' ' << spec.weight(l) << '\n';
  write_file_atomic(path, out.str());
}

}  // namespace qrng
