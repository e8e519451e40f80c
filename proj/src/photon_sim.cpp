#include "qrng/photon_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qrng/error.hpp"

namespace qrng {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

// Modal filter pass probabilities for one pair: herald alone, each B arm
// alone, and herald together with each B arm.
struct FilterPass {
  double herald = 1.0;
  std::array<double, 2> arm{1.0, 1.0};
  std::array<double, 2> joint{1.0, 1.0};
};

FilterPass filter_pass(const ExperimentConfig& config) {
  FilterPass f;
  if (!config.projection) return f;
  const Projection& p = *config.projection;
  const std::array<int, 2> l_b{p.l_B0, p.l_B1};
  for (std::size_t i = 0; i < 2; ++i) f.arm[i] = marginal_projection_weight(p.spectrum, l_b[i], p.crosstalk);
  if (p.l_A) {
    f.herald = herald_projection_weight(p.spectrum, *p.l_A, p.crosstalk);
    for (std::size_t i = 0; i < 2; ++i)
      f.joint[i] = joint_projection_probability(p.spectrum, *p.l_A, l_b[i], p.crosstalk);
  } else {
    f.joint = f.arm;
  }
  return f;
}

// Draws the detection time of one photon around the pair's true emission
// time (integer + fractional picoseconds), clamped to the run.
std::uint64_t detection_time(std::uint64_t t_int, double t_frac, double jitter_ps,
                             std::normal_distribution<double>& jitter, std::mt19937_64& rng,
                             std::uint64_t end_ps) {
  double offset = t_frac;
  if (jitter_ps > 0.0) offset += jitter(rng);
  const std::int64_t ts = static_cast<std::int64_t>(t_int) + std::llround(offset);
  if (ts < 0) return 0;
  return std::min(static_cast<std::uint64_t>(ts), end_ps);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(pair_rate_hz >= 0.0) || !std::isfinite(pair_rate_hz))
    throw ParameterError("pair_rate_hz must be non-negative");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ParameterError("duration_s must be positive");
  if (duration_s > kMaxDurationS)
    throw RangeError("duration_s exceeds the 64-bit picosecond range (max " +
                     std::to_string(kMaxDurationS) + " s)");
  if (!is_probability(efficiency_A) || !is_probability(efficiency_B0) || !is_probability(efficiency_B1))
    throw ParameterError("detector efficiencies must lie in [0, 1]");
  for (double d : dark_rate_hz)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ParameterError("dark rates must be non-negative");
  if (!(jitter_ps >= 0.0) || !std::isfinite(jitter_ps)) throw ParameterError("jitter_ps must be non-negative");
  if (!(dead_time_ps >= 0.0) || !std::isfinite(dead_time_ps))
    throw ParameterError("dead_time_ps must be non-negative");
  splitter.validate();
  if (projection) {
    const auto& p = *projection;
    if (!p.spectrum.contains(p.l_B0) || !p.spectrum.contains(p.l_B1) ||
        (p.l_A && !p.spectrum.contains(*p.l_A)))
      throw RangeError("projection OAM index outside spectrum range ±" +
                       std::to_string(p.spectrum.l_max()));
    if (!(p.crosstalk >= 0.0 && p.crosstalk < 1.0)) throw ParameterError("crosstalk must lie in [0, 1)");
  }
}

PairOutcomes pair_outcomes(const ExperimentConfig& config) {
  config.validate();
  const SplitterConfig& s = config.splitter;
  const double R = s.bias_ratio_R;
  // Raw split before the gratings act, then first-order efficiency, then the
  // detector. Light in other orders is lost.
  const std::array<double, 2> reach{
      R / (1.0 + R) * diffraction_efficiency(1, s.depth_M0) * config.efficiency_B0,
      1.0 / (1.0 + R) * diffraction_efficiency(1, s.depth_M1) * config.efficiency_B1};
  const FilterPass f = filter_pass(config);
  const double eta_a = config.efficiency_A;

  PairOutcomes o;
  o.coincidence_B0 = eta_a * reach[0] * f.joint[0];
  o.coincidence_B1 = eta_a * reach[1] * f.joint[1];
  o.only_B0 = reach[0] * (f.arm[0] - eta_a * f.joint[0]);
  o.only_B1 = reach[1] * (f.arm[1] - eta_a * f.joint[1]);
  o.only_A = eta_a * (f.herald - reach[0] * f.joint[0] - reach[1] * f.joint[1]);
  return o;
}

std::vector<TimeTagEvent> simulate(const ExperimentConfig& config) {
  const PairOutcomes o = pair_outcomes(config);  // validates
  const std::uint64_t end_ps = static_cast<std::uint64_t>(std::llround(config.duration_s * 1e12));

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, config.jitter_ps > 0.0 ? config.jitter_ps : 1.0);

  std::vector<TimeTagEvent> events;

  // Pairs with no detection never reach the output, so only the thinned
  // process of pairs with at least one detection is generated. Its pattern
  // is then drawn from the conditional distribution.
  const double p_any = o.any();
  const double rate = config.pair_rate_hz * p_any;
  if (rate > 0.0) {
    const double expected = rate * config.duration_s;
    events.reserve(static_cast<std::size_t>(expected * 2.2) + 16);

    const std::array<double, 4> cdf{
        o.coincidence_B0 / p_any, (o.coincidence_B0 + o.coincidence_B1) / p_any,
        (o.coincidence_B0 + o.coincidence_B1 + o.only_A) / p_any,
        (o.coincidence_B0 + o.coincidence_B1 + o.only_A + o.only_B0) / p_any};
    std::exponential_distribution<double> gap(rate / 1e12);  // per picosecond

    std::uint64_t t_int = 0;
    double t_frac = 0.0;
    for (;;) {
      t_frac += gap(rng);
      const double whole = std::floor(t_frac);
      if (whole >= double(end_ps - t_int)) break;  // emission at or past the end
      t_int += static_cast<std::uint64_t>(whole);
      t_frac -= whole;

      const double u = unit(rng);
      const bool herald = u < cdf[2];
      Channel b = Channel::A;  // A marks "no B detection"
      if (u < cdf[0]) b = Channel::B0;
      else if (u < cdf[1]) b = Channel::B1;
      else if (u >= cdf[2]) b = u < cdf[3] ? Channel::B0 : Channel::B1;

      if (herald)
        events.push_back({Channel::A, detection_time(t_int, t_frac, config.jitter_ps, jitter, rng, end_ps)});
      if (b != Channel::A)
        events.push_back({b, detection_time(t_int, t_frac, config.jitter_ps, jitter, rng, end_ps)});
    }
  }

  for (int c = 0; c < kChannelCount; ++c) {
    const double mean = config.dark_rate_hz[static_cast<std::size_t>(c)] * config.duration_s;
    if (mean <= 0.0) continue;
    std::poisson_distribution<std::uint64_t> count(mean);
    std::uniform_int_distribution<std::uint64_t> when(0, end_ps);
    const std::uint64_t n = count(rng);
    for (std::uint64_t i = 0; i < n; ++i) events.push_back({static_cast<Channel>(c), when(rng)});
  }

  std::sort(events.begin(), events.end());

  if (config.dead_time_ps > 0.0) {
    const auto dead = static_cast<std::uint64_t>(std::llround(config.dead_time_ps));
    std::array<std::optional<std::uint64_t>, kChannelCount> last{};
    std::size_t kept = 0;
    for (const TimeTagEvent& e : events) {
      auto& l = last[static_cast<std::size_t>(e.channel)];
      if (l && e.timestamp_ps - *l < dead) continue;
      l = e.timestamp_ps;
      events[kept++] = e;
    }
    events.resize(kept);
  }
  return events;
}

ExperimentConfig reference_config() {
  ExperimentConfig c;
  c.pair_rate_hz = 400e3;
  c.duration_s = 1.0;
  c.efficiency_A = 0.2;
  c.efficiency_B0 = 0.3;
  c.efficiency_B1 = 0.3;
  c.dark_rate_hz = {100.0, 100.0, 100.0};
  c.jitter_ps = 350.0;
  c.splitter.bias_ratio_R = 0.8518;
  c.seed = 1;
  return c;
}

}  // namespace qrng
