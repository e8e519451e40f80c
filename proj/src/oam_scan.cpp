#include "qrng/oam_scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "qrng/coincidence.hpp"
#include "qrng/error.hpp"
#include "qrng/manifest.hpp"

namespace qrng {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double hmin_of(double p0) { return -std::log2(std::max(p0, 1.0 - p0)); }

}  // namespace

void ScanRange::validate() const {
  if (hi < lo) throw ParameterError("scan range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is empty");
}

SpiralBandwidthData::SpiralBandwidthData(ScanRange l_b, ScanRange l_a, double acquisition_s)
    : l_b_(l_b), l_a_(l_a), acquisition_s_(acquisition_s) {
  l_b_.validate();
  l_a_.validate();
  if (!(acquisition_s >= 0.0)) throw ParameterError("acquisition time must be non-negative");
  counts_.assign(2 * std::size_t(l_b_.size()) * std::size_t(l_a_.size()), 0);
}

std::size_t SpiralBandwidthData::index(Arm arm, int l_b, int l_a) const {
  if (!l_b_.contains(l_b) || !l_a_.contains(l_a))
    throw RangeError("(l_B, l_A) = (" + std::to_string(l_b) + ", " + std::to_string(l_a) +
                     ") lies outside the scanned grid");
  const std::size_t nb = std::size_t(l_b_.size()), na = std::size_t(l_a_.size());
  return (std::size_t(arm) * nb + std::size_t(l_b - l_b_.lo)) * na + std::size_t(l_a - l_a_.lo);
}

std::uint64_t SpiralBandwidthData::count(Arm arm, int l_b, int l_a) const { return counts_[index(arm, l_b, l_a)]; }

void SpiralBandwidthData::set_count(Arm arm, int l_b, int l_a, std::uint64_t n) {
  counts_[index(arm, l_b, l_a)] = n;
}

std::uint64_t SpiralBandwidthData::arm_total(Arm arm, int l_b) const {
  std::uint64_t sum = 0;
  for (int l_a = l_a_.lo; l_a <= l_a_.hi; ++l_a) sum += count(arm, l_b, l_a);
  return sum;
}

SpiralBandwidthData measure_spiral_bandwidth(const ExperimentConfig& config, ScanRange l_range,
                                             double dwell_s, unsigned threads) {
  l_range.validate();
  if (!(dwell_s >= 0.0) || !std::isfinite(dwell_s)) throw ParameterError("dwell must be non-negative");
  const Projection base = config.projection.value_or(Projection{});
  if (!base.spectrum.contains(l_range.lo) || !base.spectrum.contains(l_range.hi))
    throw RangeError("scan range exceeds the spectrum's l_max of " + std::to_string(base.spectrum.l_max()));

  SpiralBandwidthData data(l_range, l_range, dwell_s);
  if (dwell_s == 0.0) return data;

  const int n = l_range.size();
  const std::size_t points = std::size_t(n) * std::size_t(n);
  auto run_point = [&](std::size_t k) {
    const int l_b = l_range.lo + int(k / std::size_t(n));
    const int l_a = l_range.lo + int(k % std::size_t(n));
    ExperimentConfig c = config;
    c.duration_s = dwell_s;
    c.seed = splitmix64(config.seed ^ splitmix64(k));
    Projection p = base;
    p.l_B0 = p.l_B1 = l_b;
    p.l_A = l_a;
    c.projection = std::move(p);
    const auto tags = simulate(c);
    CoincidenceParams params;
    params.duration_s = dwell_s;
    const BitString bits = extract_bits(tags, params);
    data.set_count(Arm::B0, l_b, l_a, bits.n_coincidences_0);
    data.set_count(Arm::B1, l_b, l_a, bits.n_coincidences_1);
  };

  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t k = 0; k < points; ++k) run_point(k);
    return data;
  }
  // Each point writes a distinct cell, so workers only share the work index.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t)
      workers.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < points;) {
          try {
            run_point(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
  return data;
}

PathProbabilities conditional_probabilities(const SpiralBandwidthData& data, int l_b0, int l_b1) {
  const double n0 = double(data.arm_total(Arm::B0, l_b0));
  const double n1 = double(data.arm_total(Arm::B1, l_b1));
  if (n0 + n1 == 0.0)
    throw DegenerateInputError("no coincidences recorded for (l_B0, l_B1) = (" + std::to_string(l_b0) + ", " +
                               std::to_string(l_b1) + ")");
  return {n0 / (n0 + n1), n1 / (n0 + n1)};
}

std::vector<OamSurfacePoint> entropy_rate_surface(const SpiralBandwidthData& data, ScanRange l_b0_range,
                                                  ScanRange l_b1_range) {
  l_b0_range.validate();
  l_b1_range.validate();
  std::vector<OamSurfacePoint> out;
  std::uint64_t peak = 0;
  for (int a = l_b0_range.lo; a <= l_b0_range.hi; ++a)
    for (int b = l_b1_range.lo; b <= l_b1_range.hi; ++b) {
      OamSurfacePoint pt;
      pt.l_B0 = a;
      pt.l_B1 = b;
      pt.n0 = data.arm_total(Arm::B0, a);
      pt.n1 = data.arm_total(Arm::B1, b);
      const auto [p0, p1] = conditional_probabilities(data, a, b);
      (void)p1;
      pt.p0_given = p0;
      pt.hmin = hmin_of(p0);
      peak = std::max(peak, pt.n0 + pt.n1);
      out.push_back(pt);
    }
  for (auto& pt : out) pt.normalized_rate = double(pt.n0 + pt.n1) / double(peak);
  return out;
}

std::vector<double> normalized_diagonal(const SpiralBandwidthData& data, Arm arm) {
  const ScanRange& rb = data.l_b_range();
  const ScanRange& ra = data.l_a_range();
  std::uint64_t peak = 0;
  for (int b = rb.lo; b <= rb.hi; ++b)
    for (int a = ra.lo; a <= ra.hi; ++a) peak = std::max(peak, data.count(arm, b, a));
  std::vector<double> out;
  for (int b = rb.lo; b <= rb.hi; ++b) {
    const double c = ra.contains(-b) ? double(data.count(arm, b, -b)) : 0.0;
    out.push_back(peak ? c / double(peak) : 0.0);
  }
  return out;
}

double diagonal_fwhm(const SpiralBandwidthData& data, Arm arm) {
  // Weighted least squares of y = log(c) on (1, l, l^2); var(log c) ~ 1/c.
  double S[5] = {0, 0, 0, 0, 0};  // Σ w l^k, k = 0..4
  double T[3] = {0, 0, 0};        // Σ w l^k y
  int used = 0;
  for (int l = data.l_b_range().lo; l <= data.l_b_range().hi; ++l) {
    if (!data.l_a_range().contains(-l)) continue;
    const double c = double(data.count(arm, l, -l));
    if (c <= 0.0) continue;
    ++used;
    const double y = std::log(c);
    double lk = 1.0;
    for (int k = 0; k < 5; ++k, lk *= l) {
      S[k] += c * lk;
      if (k < 3) T[k] += c * lk * y;
    }
  }
  if (used < 3) throw DegenerateInputError("too few non-empty diagonal cells for a Gaussian fit");

  // Solve the 3x3 normal equations by Cramer's rule.
  const double A[3][3] = {{S[0], S[1], S[2]}, {S[1], S[2], S[3]}, {S[2], S[3], S[4]}};
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det3(A);
  double A2[3][3];
  std::copy(&A[0][0], &A[0][0] + 9, &A2[0][0]);
  for (int r = 0; r < 3; ++r) A2[r][2] = T[r];
  const double quad = det3(A2) / d;
  if (!(quad < 0.0) || !std::isfinite(quad)) throw DegenerateInputError("diagonal counts show no peak");
  const double sigma = std::sqrt(-1.0 / (2.0 * quad));
  return 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma;
}

double predicted_p0(const SpiralSpectrum& spec, int l_b0, int l_b1, double crosstalk) {
  const double w0 = marginal_projection_weight(spec, l_b0, crosstalk);
  const double w1 = marginal_projection_weight(spec, l_b1, crosstalk);
  if (w0 + w1 == 0.0) throw DegenerateInputError("both projections have zero weight");
  return w0 / (w0 + w1);
}

int tailor_bias(const SpiralSpectrum& spec, double target_p0, int l_b0, int l_range, double crosstalk) {
  if (!(target_p0 > 0.0 && target_p0 < 1.0)) throw ParameterError("target p0 must lie in (0, 1)");
  if (l_range < 0) throw ParameterError("l_range must be non-negative");
  if (!spec.contains(l_b0) || !spec.contains(l_range) || !spec.contains(-l_range))
    throw RangeError("projection outside the spectrum's l_max of " + std::to_string(spec.l_max()));

  double lo = 1.0, hi = 0.0;
  int best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  // Visit 0, +1, -1, +2, -2, ... so strict improvement keeps the preferred tie.
  for (int mag = 0; mag <= l_range; ++mag)
    for (int l : {mag, -mag}) {
      if (mag == 0 && l < 0) continue;
      const double p = predicted_p0(spec, l_b0, l, crosstalk);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      const double err = std::abs(p - target_p0);
      if (err < best_err - 1e-12) {
        best_err = err;
        best = l;
      }
    }
  if (target_p0 < lo || target_p0 > hi)
    throw UnachievableTargetError("no l_B1 in [-" + std::to_string(l_range) + ", " + std::to_string(l_range) +
                                      "] reaches p0 = " + std::to_string(target_p0),
                                  lo, hi);
  return best;
}

void write_spiral_csv(const SpiralBandwidthData& data, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "arm,l_B,l_A,counts,normalized\n";
    for (Arm arm : {Arm::B0, Arm::B1}) {
      std::uint64_t peak = 0;
      for (int b = data.l_b_range().lo; b <= data.l_b_range().hi; ++b)
        for (int a = data.l_a_range().lo; a <= data.l_a_range().hi; ++a) peak = std::max(peak, data.count(arm, b, a));
      for (int b = data.l_b_range().lo; b <= data.l_b_range().hi; ++b)
        for (int a = data.l_a_range().lo; a <= data.l_a_range().hi; ++a) {
          const auto c = data.count(arm, b, a);
          out << (arm == Arm::B0 ? "B0" : "B1") << ',' << b << ',' << a << ',' << c << ','
              << (peak ? double(c) / double(peak) : 0.0) << '\n';
        }
    }
  });
}

void write_surface_csv(const std::vector<OamSurfacePoint>& surface, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    out.precision(10);
    out << "l_B0,l_B1,p0,hmin,normalized_rate\n";
    for (const auto& pt : surface)
      out << pt.l_B0 << ',' << pt.l_B1 << ',' << pt.p0_given << ',' << pt.hmin << ',' << pt.normalized_rate << '\n';
  });
}

}  // namespace qrng
