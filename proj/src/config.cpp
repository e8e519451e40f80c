#include "qrng/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qrng/error.hpp"

namespace qrng {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"source", {"pair_rate_hz", "duration_s", "seed"}},
      {"detectors",
       {"efficiency_A", "efficiency_B0", "efficiency_B1", "dark_rate_A_hz", "dark_rate_B0_hz", "dark_rate_B1_hz",
        "jitter_ps", "dead_time_ps"}},
      {"splitter", {"bias_ratio_R", "depth_M0", "depth_M1", "grey_levels"}},
      {"spectrum", {"fwhm", "sigma", "l_max", "crosstalk", "file"}},
      {"projection", {"l_B0", "l_B1", "l_A"}},
      {"coincidence", {"window_ns", "policy"}},
  };
  return s;
}

// Typed access to one section, rejecting keys outside the schema.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool present() const { return tree_ != nullptr; }
  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::string text(const std::string& key) const { return tree_->get<std::string>(key); }

  template <typename T>
  void read(const std::string& key, T& target) const {
    if (!has(key)) return;
    const std::string s = text(key);
    T value{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size())
      throw ParameterError("[" + name_ + "] " + key + ": cannot parse '" + s + "'");
    target = value;
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParameterError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ParameterError("config: unknown section [" + section + "]");
    if (!body.data().empty()) throw ParameterError("config: key '" + section + "' outside any section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ParameterError("config: unknown key '" + key + "' in [" + section + "]");
  }
  auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  RunConfig rc;
  ExperimentConfig& x = rc.experiment;

  const Section source = section("source");
  source.read("pair_rate_hz", x.pair_rate_hz);
  source.read("duration_s", x.duration_s);
  source.read("seed", x.seed);

  const Section det = section("detectors");
  det.read("efficiency_A", x.efficiency_A);
  det.read("efficiency_B0", x.efficiency_B0);
  det.read("efficiency_B1", x.efficiency_B1);
  det.read("dark_rate_A_hz", x.dark_rate_hz[0]);
  det.read("dark_rate_B0_hz", x.dark_rate_hz[1]);
  det.read("dark_rate_B1_hz", x.dark_rate_hz[2]);
  det.read("jitter_ps", x.jitter_ps);
  det.read("dead_time_ps", x.dead_time_ps);

  const Section split = section("splitter");
  split.read("bias_ratio_R", x.splitter.bias_ratio_R);
  split.read("depth_M0", x.splitter.depth_M0);
  split.read("depth_M1", x.splitter.depth_M1);
  split.read("grey_levels", x.splitter.grey_levels);

  const Section spec = section("spectrum");
  const Section proj = section("projection");
  if (spec.present() || proj.present()) {
    Projection p;
    if (spec.has("file") && (spec.has("fwhm") || spec.has("sigma") || spec.has("l_max")))
      throw ParameterError("config: [spectrum] file excludes fwhm, sigma and l_max");
    if (spec.has("fwhm") && spec.has("sigma")) throw ParameterError("config: [spectrum] give fwhm or sigma, not both");
    if (spec.has("file")) {
      rc.spectrum_file = spec.text("file");
      std::filesystem::path f = *rc.spectrum_file;
      if (f.is_relative() && !base.empty()) f = base / f;
      p.spectrum = read_spectrum(f);
    } else if (spec.has("fwhm") || spec.has("sigma") || spec.has("l_max")) {
      double sigma = sigma_from_fwhm(kDefaultSpectrumFwhm);
      if (spec.has("fwhm")) {
        double fwhm = 0.0;
        spec.read("fwhm", fwhm);
        sigma = sigma_from_fwhm(fwhm);
      }
      spec.read("sigma", sigma);
      int l_max = std::max(50, int(std::ceil(6.0 * sigma)));
      spec.read("l_max", l_max);
      p.spectrum = gaussian_spectrum(sigma, l_max);
    }
    spec.read("crosstalk", p.crosstalk);
    proj.read("l_B0", p.l_B0);
    proj.read("l_B1", p.l_B1);
    if (proj.has("l_A")) {
      int l_a = 0;
      proj.read("l_A", l_a);
      p.l_A = l_a;
    }
    x.projection = std::move(p);
  }

  const Section coin = section("coincidence");
  if (coin.has("window_ns")) {
    double ns = 0.0;
    coin.read("window_ns", ns);
    if (!(ns > 0.0) || !std::isfinite(ns)) throw ParameterError("config: window_ns must be positive");
    rc.coincidence.window_ps = static_cast<std::uint64_t>(std::llround(ns * 1e3));
  }
  if (coin.has("policy")) rc.coincidence.policy = parse_policy(coin.text("policy"));

  x.validate();
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

nlohmann::json to_json(const RunConfig& config) {
  const ExperimentConfig& x = config.experiment;
  nlohmann::json j = {
      {"source", {{"pair_rate_hz", x.pair_rate_hz}, {"duration_s", x.duration_s}, {"seed", x.seed}}},
      {"detectors",
       {{"efficiency_A", x.efficiency_A},
        {"efficiency_B0", x.efficiency_B0},
        {"efficiency_B1", x.efficiency_B1},
        {"dark_rate_A_hz", x.dark_rate_hz[0]},
        {"dark_rate_B0_hz", x.dark_rate_hz[1]},
        {"dark_rate_B1_hz", x.dark_rate_hz[2]},
        {"jitter_ps", x.jitter_ps},
        {"dead_time_ps", x.dead_time_ps}}},
      {"splitter",
       {{"bias_ratio_R", x.splitter.bias_ratio_R},
        {"depth_M0", x.splitter.depth_M0},
        {"depth_M1", x.splitter.depth_M1},
        {"grey_levels", x.splitter.grey_levels}}},
      {"coincidence",
       {{"window_ps", config.coincidence.window_ps},
        {"policy", std::string(policy_name(config.coincidence.policy))}}},
  };
  if (x.projection) {
    const Projection& p = *x.projection;
    j["projection"] = {{"l_B0", p.l_B0}, {"l_B1", p.l_B1}};
    j["projection"]["l_A"] = p.l_A ? nlohmann::json(*p.l_A) : nlohmann::json(nullptr);
    j["spectrum"] = {{"sigma", p.spectrum.sigma()}, {"l_max", p.spectrum.l_max()}, {"crosstalk", p.crosstalk}};
    if (config.spectrum_file) j["spectrum"]["file"] = *config.spectrum_file;
  }
  return j;
}

}  // namespace qrng
