// qrng: command-line front end for the simulation and post-processing
// pipeline. Exit codes: 0 ok, 1 usage, 2 I/O, 3 validation, 4 test failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrng/bits_io.hpp"
#include "qrng/coincidence.hpp"
#include "qrng/config.hpp"
#include "qrng/entropy.hpp"
#include "qrng/error.hpp"
#include "qrng/hologram.hpp"
#include "qrng/manifest.hpp"
#include "qrng/oam_scan.hpp"
#include "qrng/photon_sim.hpp"
#include "qrng/stattests.hpp"
#include "qrng/time_tags.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitTestFailure = 4;

// Flags shared by every command.
struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::string manifest;

  void add_to(CLI::App* cmd, bool out_required = true) {
    cmd->add_option("--seed", seed, "Root RNG seed (overrides the config)");
    cmd->add_option("--config", config, "INI configuration file");
    auto* o = cmd->add_option("--out", out, "Output path");
    if (out_required) o->required();
    cmd->add_option("--manifest", manifest, "Run manifest (default: manifest.json next to --out)");
  }

  qrng::RunConfig load() const {
    qrng::RunConfig rc = config.empty() ? qrng::RunConfig{} : qrng::load_config(config);
    if (seed) rc.experiment.seed = *seed;
    return rc;
  }

  fs::path manifest_path() const {
    if (!manifest.empty()) return manifest;
    const fs::path parent = fs::path(out).parent_path();
    return (parent.empty() ? fs::path(".") : parent) / "manifest.json";
  }

  void record(const std::string& command, std::uint64_t used_seed, json cfg, std::vector<std::string> inputs,
              const std::vector<fs::path>& outputs) const {
    qrng::ManifestEntry e;
    e.command = command;
    e.seed = used_seed;
    e.config = std::move(cfg);
    if (!config.empty()) e.inputs.push_back(config);
    for (auto& i : inputs) e.inputs.push_back(std::move(i));
    for (const auto& p : outputs) e.outputs.push_back(qrng::hashed_output(p));
    qrng::append_manifest(manifest_path(), e);
  }
};

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw qrng::IoError(std::string(what) + " not found: " + path);
}

void write_json(const fs::path& path, const json& j) { qrng::write_file_atomic(path, j.dump(2) + "\n"); }

std::string with_suffix(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string calibration;
  std::optional<double> duration_s;
};

int cmd_simulate(const SimulateArgs& a) {
  qrng::RunConfig rc = a.common.load();
  qrng::ExperimentConfig& x = rc.experiment;
  if (a.duration_s) x.duration_s = *a.duration_s;
  std::vector<std::string> inputs;
  if (!a.calibration.empty()) {
    require_file(a.calibration, "calibration file");
    std::ifstream in(a.calibration);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw qrng::ParameterError("calibration file: " + std::string(e.what()));
    }
    // The calibration supplies grating depths; the source's bias stays.
    const qrng::SplitterConfig cal = qrng::calibration_from_json(j).splitter();
    x.splitter.depth_M0 = cal.depth_M0;
    x.splitter.depth_M1 = cal.depth_M1;
    x.splitter.grey_levels = cal.grey_levels;
    inputs.push_back(a.calibration);
  }
  x.validate();
  const auto tags = qrng::simulate(x);
  qrng::write_tags(tags, fs::path(a.common.out));
  std::cout << "wrote " << tags.size() << " events (" << x.duration_s << " s) to " << a.common.out << "\n";
  a.common.record("simulate", x.seed, qrng::to_json(rc), inputs, {a.common.out});
  return 0;
}

// --- extract --------------------------------------------------------------

struct ExtractArgs {
  Common common;
  std::string tags;
  std::optional<double> window_ns;
  std::string policy;
  std::string format = "ascii";
  std::string report;
};

int cmd_extract(const ExtractArgs& a) {
  require_file(a.tags, "tag file");
  qrng::RunConfig rc = a.common.load();
  qrng::CoincidenceParams params = rc.coincidence;
  if (a.window_ns) {
    if (!(*a.window_ns > 0.0)) throw qrng::ParameterError("--window-ns must be positive");
    params.window_ps = static_cast<std::uint64_t>(std::llround(*a.window_ns * 1e3));
  }
  if (!a.policy.empty()) params.policy = qrng::parse_policy(a.policy);
  const qrng::BitFormat format = qrng::parse_bit_format(a.format);

  qrng::TagReader reader(a.tags);
  qrng::CoincidenceExtractor extractor(params);
  while (auto e = reader.next()) extractor.push(*e);
  const qrng::BitString bits = extractor.finish();

  qrng::write_bits(a.common.out, bits.bits, format);
  json report = {{"n_bits", bits.bits.size()},
                 {"n_coincidences_0", bits.n_coincidences_0},
                 {"n_coincidences_1", bits.n_coincidences_1},
                 {"n_ambiguous_discarded", bits.n_ambiguous_discarded},
                 {"n_unmatched_A", bits.n_unmatched_A},
                 {"n_unmatched_B", bits.n_unmatched_B},
                 {"duration_s", bits.duration_s},
                 {"bit_rate_hz", bits.bit_rate_hz},
                 {"window_ps", params.window_ps},
                 {"policy", std::string(qrng::policy_name(params.policy))}};
  if (bits.n_coincidences_0 > 0 && bits.n_coincidences_1 > 0)
    report["entropy"] = qrng::to_json(qrng::estimate_bias(bits));
  else
    report["entropy"] = nullptr;
  const fs::path report_path = a.report.empty() ? with_suffix(a.common.out, ".entropy.json") : a.report;
  write_json(report_path, report);

  std::cout << "extracted " << bits.bits.size() << " bits (" << bits.bit_rate_hz << " Hz)";
  if (!report["entropy"].is_null())
    std::cout << ", R = " << report["entropy"]["R_hat"].get<double>()
              << ", H_min = " << report["entropy"]["H_min"].get<double>();
  std::cout << "\n";

  std::vector<fs::path> outputs{a.common.out, report_path};
  if (format == qrng::BitFormat::packed) outputs.push_back(qrng::packed_sidecar(a.common.out));
  a.common.record("extract", rc.experiment.seed,
                  {{"window_ps", params.window_ps},
                   {"policy", std::string(qrng::policy_name(params.policy))},
                   {"format", a.format}},
                  {a.tags}, outputs);
  return 0;
}

// --- calibrate ------------------------------------------------------------

struct CalibrateArgs {
  Common common;
  std::string tags;
  std::string bits;
  std::string format = "ascii";
  std::optional<double> R;
  int levels = qrng::kDefaultGreyLevels;
};

int cmd_calibrate(const CalibrateArgs& a) {
  const int sources = int(!a.tags.empty()) + int(!a.bits.empty()) + int(a.R.has_value());
  if (sources != 1) throw qrng::ParameterError("give exactly one of --tags, --bits or --R");

  qrng::RunConfig rc = a.common.load();
  json measurement = nullptr;
  std::vector<std::string> inputs;
  double R = 0.0;
  if (a.R) {
    R = *a.R;
  } else {
    qrng::BiasEstimate est;
    if (!a.tags.empty()) {
      require_file(a.tags, "tag file");
      qrng::TagReader reader(a.tags);
      qrng::CoincidenceExtractor extractor(rc.coincidence);
      while (auto e = reader.next()) extractor.push(*e);
      est = qrng::estimate_bias(extractor.finish());
      inputs.push_back(a.tags);
    } else {
      require_file(a.bits, "bit file");
      const auto bits = qrng::read_bits(a.bits, qrng::parse_bit_format(a.format));
      std::uint64_t ones = 0;
      for (auto b : bits) ones += b;
      est = qrng::estimate_bias(bits.size() - ones, ones);
      inputs.push_back(a.bits);
    }
    R = est.R_hat;
    measurement = qrng::to_json(est);
  }

  const qrng::Calibration cal = qrng::calibrate(R, a.levels);
  json out = qrng::to_json(cal);
  out["H_min_uncorrected"] = -std::log2(std::max(R, 1.0) / (1.0 + R));
  out["measurement"] = measurement;
  write_json(a.common.out, out);
  std::cout << "R = " << cal.R << ": attenuate " << cal.attenuated_arm << " to M* = " << cal.M_star
            << " (quantized " << cal.M_quantized << "), predicted H_min = " << cal.H_min_predicted << " ± "
            << cal.dH_min << "\n";
  a.common.record("calibrate", rc.experiment.seed, {{"R", R}, {"grey_levels", a.levels}}, inputs,
                  {a.common.out});
  return 0;
}

// --- test -----------------------------------------------------------------

struct TestArgs {
  Common common;
  std::string bits;
  std::string format = "ascii";
  double alpha = qrng::stattests::kDefaultAlpha;
  std::string suite = "core";
  bool parallel = false;
};

int cmd_test(const TestArgs& a) {
  require_file(a.bits, "bit file");
  const auto bits = qrng::read_bits(a.bits, qrng::parse_bit_format(a.format));
  qrng::stattests::SuiteOptions opt;
  opt.parallel = a.parallel;
  const auto report = qrng::stattests::run_suite(bits, a.alpha, qrng::stattests::parse_suite(a.suite), opt);
  std::cout << qrng::stattests::format_table(report);
  write_json(a.common.out, qrng::stattests::to_json(report));
  a.common.record("test", 0, {{"alpha", a.alpha}, {"suite", a.suite}, {"format", a.format}}, {a.bits},
                  {a.common.out});
  if (!report.all_passed()) {
    std::cout << "FAILED:";
    for (const auto& name : report.failed_tests()) std::cout << ' ' << name;
    std::cout << "\n";
    return kExitTestFailure;
  }
  return 0;
}

// --- oam-scan -------------------------------------------------------------

struct ScanArgs {
  Common common;
  int l0 = 4;
  std::string l1_range = "-20:20";
  double dwell_s = 1.0;
  unsigned threads = 1;
};

qrng::ScanRange parse_range(const std::string& text) {
  const auto colon = text.find(':', 1);
  if (colon == std::string::npos) throw qrng::ParameterError("range must look like lo:hi, got '" + text + "'");
  try {
    std::size_t used_lo = 0, used_hi = 0;
    const std::string lo_text = text.substr(0, colon), hi_text = text.substr(colon + 1);
    qrng::ScanRange r{std::stoi(lo_text, &used_lo), std::stoi(hi_text, &used_hi)};
    if (used_lo != lo_text.size() || used_hi != hi_text.size()) throw std::invalid_argument(text);
    r.validate();
    return r;
  } catch (const std::logic_error&) {
    throw qrng::ParameterError("range must look like lo:hi, got '" + text + "'");
  }
}

int cmd_oam_scan(const ScanArgs& a) {
  qrng::RunConfig rc = a.common.load();
  qrng::ExperimentConfig& x = rc.experiment;
  if (!x.projection) x.projection = qrng::Projection{};
  const qrng::ScanRange l1 = parse_range(a.l1_range);
  const int reach = std::max({std::abs(a.l0), std::abs(l1.lo), std::abs(l1.hi)});
  const qrng::ScanRange grid{-reach, reach};

  const auto data = qrng::measure_spiral_bandwidth(x, grid, a.dwell_s, a.threads);
  const std::string spiral = a.common.out + "_spiral.csv";
  const std::string surface = a.common.out + "_surface.csv";
  qrng::write_spiral_csv(data, spiral);
  qrng::write_surface_csv(qrng::entropy_rate_surface(data, {a.l0, a.l0}, l1), surface);
  for (qrng::Arm arm : {qrng::Arm::B0, qrng::Arm::B1}) {
    std::cout << (arm == qrng::Arm::B0 ? "B0" : "B1") << " diagonal FWHM: ";
    try {
      std::cout << qrng::diagonal_fwhm(data, arm) << "\n";
    } catch (const qrng::DegenerateInputError&) {
      std::cout << "n/a\n";
    }
  }
  std::cout << "wrote " << spiral << " and " << surface << "\n";
  json cfg = qrng::to_json(rc);
  cfg["scan"] = {{"l0", a.l0}, {"l1_range", a.l1_range}, {"dwell_s", a.dwell_s}};
  a.common.record("oam-scan", x.seed, cfg, {}, {spiral, surface});
  return 0;
}

// --- figures --------------------------------------------------------------

struct FiguresArgs {
  Common common;
  std::string before;
  std::string after;
  double R = 0.8518;
  int l_range = 20;
};

qrng::stattests::TestReport load_report(const std::string& path) {
  require_file(path, "test report");
  std::ifstream in(path);
  try {
    return qrng::stattests::report_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw qrng::ParameterError(path + ": " + e.what());
  }
}

int cmd_figures(const FiguresArgs& a) {
  const fs::path dir = a.common.out;
  fs::create_directories(dir);
  qrng::RunConfig rc = a.common.load();
  std::vector<fs::path> outputs;
  std::vector<std::string> inputs;

  // Test p-values before and after correction.
  if (!a.before.empty() || !a.after.empty()) {
    if (a.before.empty() || a.after.empty()) throw qrng::ParameterError("--before and --after go together");
    const auto before = load_report(a.before), after = load_report(a.after);
    std::ostringstream csv;
    csv.precision(10);
    csv << "test,p_before,p_after\n";
    const std::size_t n = std::min(before.records.size(), after.records.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& b = before.records[i];
      const auto& c = after.records[i];
      const std::string label = b.variant.empty() ? b.name : b.name + "[" + b.variant + "]";
      csv << label << ',';
      if (b.p_value) csv << *b.p_value;
      csv << ',';
      if (c.p_value) csv << *c.p_value;
      csv << '\n';
    }
    outputs.push_back(dir / "pvalues.csv");
    qrng::write_file_atomic(outputs.back(), csv.str());
    inputs.push_back(a.before);
    inputs.push_back(a.after);
  }

  // Min-entropy against grating depth for the given bias.
  {
    std::ostringstream csv;
    csv.precision(10);
    csv << "M,H_min\n";
    for (int i = 0; i <= 1000; ++i) {
      const double M = i / 1000.0;
      csv << M << ',' << qrng::min_entropy_surface(a.R <= 1.0 ? a.R : 1.0 / a.R, M) << '\n';
    }
    outputs.push_back(dir / "entropy_vs_depth.csv");
    qrng::write_file_atomic(outputs.back(), csv.str());
  }

  // Closed-form spiral bandwidth and entropy/rate surface.
  const qrng::Projection proj = rc.experiment.projection.value_or(qrng::Projection{});
  if (!proj.spectrum.contains(a.l_range)) throw qrng::RangeError("--l-range exceeds the spectrum");
  {
    std::ostringstream csv;
    csv.precision(10);
    csv << "l_A,l_B,probability\n";
    double peak = 0.0;
    for (int lb = -a.l_range; lb <= a.l_range; ++lb)
      peak = std::max(peak, qrng::joint_projection_probability(proj.spectrum, -lb, lb, proj.crosstalk));
    for (int lb = -a.l_range; lb <= a.l_range; ++lb)
      for (int la = -a.l_range; la <= a.l_range; ++la)
        csv << la << ',' << lb << ','
            << qrng::joint_projection_probability(proj.spectrum, la, lb, proj.crosstalk) / peak << '\n';
    outputs.push_back(dir / "spiral_bandwidth.csv");
    qrng::write_file_atomic(outputs.back(), csv.str());
  }
  {
    std::ostringstream csv;
    csv.precision(10);
    csv << "l_B0,l_B1,p0,hmin,normalized_rate\n";
    double peak = 0.0;
    auto rate = [&](int a0, int a1) {
      return qrng::marginal_projection_weight(proj.spectrum, a0, proj.crosstalk) +
             qrng::marginal_projection_weight(proj.spectrum, a1, proj.crosstalk);
    };
    for (int a0 = -a.l_range; a0 <= a.l_range; ++a0)
      for (int a1 = -a.l_range; a1 <= a.l_range; ++a1) peak = std::max(peak, rate(a0, a1));
    for (int a0 = -a.l_range; a0 <= a.l_range; ++a0)
      for (int a1 = -a.l_range; a1 <= a.l_range; ++a1) {
        const double p0 = qrng::predicted_p0(proj.spectrum, a0, a1, proj.crosstalk);
        csv << a0 << ',' << a1 << ',' << p0 << ',' << -std::log2(std::max(p0, 1.0 - p0)) << ','
            << rate(a0, a1) / peak << '\n';
      }
    outputs.push_back(dir / "entropy_rate_surface.csv");
    qrng::write_file_atomic(outputs.back(), csv.str());
  }

  for (const auto& p : outputs) std::cout << "wrote " << p.string() << "\n";
  json cfg = qrng::to_json(rc);
  cfg["figures"] = {{"R", a.R}, {"l_range", a.l_range}};
  a.common.record("figures", rc.experiment.seed, cfg, inputs, outputs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holographic QRNG simulator and post-processing pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qrng::kToolVersion));

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a time-tag stream");
  sim.common.add_to(c_sim);
  c_sim->add_option("--calibration", sim.calibration, "Calibration JSON whose depths are applied");
  c_sim->add_option("--duration", sim.duration_s, "Acquisition time in seconds (overrides the config)");

  ExtractArgs ext;
  auto* c_ext = app.add_subcommand("extract", "Extract bits from a time-tag stream");
  ext.common.add_to(c_ext);
  c_ext->add_option("--tags", ext.tags, "QTAG input")->required();
  c_ext->add_option("--window-ns", ext.window_ns, "Coincidence window in ns (default 25)");
  c_ext->add_option("--policy", ext.policy, "discard_ambiguous | first_match");
  c_ext->add_option("--format", ext.format, "ascii | packed");
  c_ext->add_option("--report", ext.report, "Entropy report path (default <out>.entropy.json)");

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Solve the grating depth that removes the bias");
  cal.common.add_to(c_cal);
  c_cal->add_option("--tags", cal.tags, "Estimate R from a QTAG stream");
  c_cal->add_option("--bits", cal.bits, "Estimate R from a bit file");
  c_cal->add_option("--format", cal.format, "Bit file format: ascii | packed");
  c_cal->add_option("--R", cal.R, "Use a known bias ratio p0/p1");
  c_cal->add_option("--levels", cal.levels, "Modulator grey levels");

  TestArgs tst;
  auto* c_tst = app.add_subcommand("test", "Run the statistical test battery");
  tst.common.add_to(c_tst);
  c_tst->add_option("--bits", tst.bits, "Bit file")->required();
  c_tst->add_option("--format", tst.format, "ascii | packed");
  c_tst->add_option("--alpha", tst.alpha, "Significance level");
  c_tst->add_option("--suite", tst.suite, "core | full");
  c_tst->add_flag("--parallel", tst.parallel, "Run tests on separate threads");

  ScanArgs scn;
  auto* c_scn = app.add_subcommand("oam-scan", "Simulated spiral bandwidth scan and entropy surface");
  scn.common.add_to(c_scn);
  c_scn->add_option("--l0", scn.l0, "Projection of arm B0 for the surface");
  c_scn->add_option("--l1-range", scn.l1_range, "Projections of arm B1, lo:hi");
  c_scn->add_option("--dwell", scn.dwell_s, "Acquisition time per grid point in seconds");
  c_scn->add_option("--threads", scn.threads, "Worker threads");

  FiguresArgs fig;
  auto* c_fig = app.add_subcommand("figures", "Write plot data (CSV) into the --out directory");
  fig.common.add_to(c_fig);
  c_fig->add_option("--before", fig.before, "Test report of the uncorrected bits");
  c_fig->add_option("--after", fig.after, "Test report of the corrected bits");
  c_fig->add_option("--R", fig.R, "Bias ratio for the entropy-versus-depth curve");
  c_fig->add_option("--l-range", fig.l_range, "OAM range of the closed-form surfaces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_ext->parsed()) return cmd_extract(ext);
    if (c_cal->parsed()) return cmd_calibrate(cal);
    if (c_tst->parsed()) return cmd_test(tst);
    if (c_scn->parsed()) return cmd_oam_scan(scn);
    if (c_fig->parsed()) return cmd_figures(fig);
  } catch (const qrng::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const qrng::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
