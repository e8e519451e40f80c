#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "qrng/config.hpp"
#include "qrng/error.hpp"

using namespace qrng;
namespace fs = std::filesystem;

TEST_CASE("empty config keeps the reference experiment") {
  const RunConfig rc = parse_config("");
  CHECK(rc.experiment.pair_rate_hz == reference_config().pair_rate_hz);
  CHECK(rc.experiment.splitter.bias_ratio_R == 0.8518);
  CHECK_FALSE(rc.experiment.projection);
  CHECK(rc.coincidence.window_ps == 25'000);
  CHECK(rc.coincidence.policy == AmbiguityPolicy::discard_ambiguous);
}

TEST_CASE("every section parses") {
  const RunConfig rc = parse_config(R"(
# desk setup
[source]
pair_rate_hz = 1.5e5
duration_s = 2
seed = 42

[detectors]
efficiency_A = 0.5
efficiency_B0 = 0.25
efficiency_B1 = 0.75
dark_rate_A_hz = 10
dark_rate_B0_hz = 20
dark_rate_B1_hz = 30
jitter_ps = 100
dead_time_ps = 22000

[splitter]
bias_ratio_R = 0.9
depth_M0 = 1.0
depth_M1 = 0.8
grey_levels = 128

[spectrum]
fwhm = 19
crosstalk = 0.05

[projection]
l_B0 = 4
l_B1 = -6
l_A = 2

[coincidence]
window_ns = 12.5
policy = first_match
)");
  const ExperimentConfig& x = rc.experiment;
  CHECK(x.pair_rate_hz == 1.5e5);
  CHECK(x.duration_s == 2.0);
  CHECK(x.seed == 42);
  CHECK(x.efficiency_B1 == 0.75);
  CHECK(x.dark_rate_hz[2] == 30.0);
  CHECK(x.dead_time_ps == 22000.0);
  CHECK(x.splitter.depth_M1 == 0.8);
  CHECK(x.splitter.grey_levels == 128);
  REQUIRE(x.projection);
  CHECK(x.projection->l_B1 == -6);
  CHECK(x.projection->l_A == 2);
  CHECK(x.projection->crosstalk == 0.05);
  CHECK(x.projection->spectrum.sigma() == doctest::Approx(sigma_from_fwhm(19.0)));
  CHECK(x.projection->spectrum.l_max() == 50);
  CHECK(rc.coincidence.window_ps == 12'500);
  CHECK(rc.coincidence.policy == AmbiguityPolicy::first_match);

  const auto j = to_json(rc);
  CHECK(j["source"]["seed"] == 42);
  CHECK(j["coincidence"]["window_ps"] == 12'500);
  CHECK(j["projection"]["l_A"] == 2);
}

TEST_CASE("wide spectra widen the cutoff") {
  const RunConfig rc = parse_config("[spectrum]\nsigma = 12\n");
  CHECK(rc.experiment.projection->spectrum.l_max() == 72);
  CHECK(parse_config("[projection]\nl_B0 = 1\n").experiment.projection->spectrum.l_max() == 50);
}

TEST_CASE("spectrum files resolve against the config directory") {
  const fs::path dir = fs::temp_directory_path() / "qrng_config_test";
  fs::create_directories(dir);
  write_spectrum(gaussian_spectrum(3.0, 20), dir / "spec.txt");
  {
    std::ofstream(dir / "run.ini") << "[spectrum]\nfile = spec.txt\n";
  }
  const RunConfig rc = load_config(dir / "run.ini");
  CHECK(rc.spectrum_file == "spec.txt");
  CHECK(rc.experiment.projection->spectrum.l_max() == 20);
  CHECK(to_json(rc)["spectrum"]["file"] == "spec.txt");
  fs::remove_all(dir);
  CHECK_THROWS_AS(load_config(dir / "run.ini"), IoError);
}

TEST_CASE("invalid configs are rejected") {
  CHECK_THROWS_AS(parse_config("[sauce]\nx = 1\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[source]\npair_rate = 1\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[source]\npair_rate_hz = fast\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[source]\nseed = -1\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[detectors]\nefficiency_A = 1.2\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[coincidence]\nwindow_ns = 0\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[coincidence]\npolicy = coin_flip\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[spectrum]\nfwhm = 19\nsigma = 8\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[spectrum]\nfile = a.txt\nsigma = 8\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("[source\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("stray = 1\n"), ParameterError);
}
