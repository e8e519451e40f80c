#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qrng/coincidence.hpp"
#include "qrng/photon_sim.hpp"

namespace qrng {

/// Everything a pipeline run reads from its configuration file.
struct RunConfig {
  ExperimentConfig experiment = reference_config();
  CoincidenceParams coincidence;
  std::optional<std::string> spectrum_file;  // as written in the file
};

/// Parses a sectioned "key = value" file:
///
///   [source]      pair_rate_hz, duration_s, seed
///   [detectors]   efficiency_A, efficiency_B0, efficiency_B1,
///                 dark_rate_A_hz, dark_rate_B0_hz, dark_rate_B1_hz,
///                 jitter_ps, dead_time_ps
///   [splitter]    bias_ratio_R, depth_M0, depth_M1, grey_levels
///   [spectrum]    fwhm | sigma, l_max, crosstalk, file
///   [projection]  l_B0, l_B1, l_A
///   [coincidence] window_ns, policy
///
/// Omitted keys keep the defaults of RunConfig. A [projection] or [spectrum]
/// section enables OAM projection. A relative spectrum file is resolved
/// against the config file's directory.
///
/// Throws IoError if the file cannot be read and ParameterError on unknown
/// sections or keys, unparsable values or an invalid result.
RunConfig load_config(const std::filesystem::path& path);

/// Same grammar from a string; relative spectrum files resolve against `base`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base = {});

/// Snapshot of every effective parameter, for run manifests.
nlohmann::json to_json(const RunConfig& config);

}  // namespace qrng
