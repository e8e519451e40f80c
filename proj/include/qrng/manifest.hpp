#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qrng {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Writes `contents` to a sibling temp file and renames it over `path`, so a
/// reader never observes a partially written file at the final path.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Streaming variant: `writer` fills the temp file. If it throws, the temp
/// file is removed and `path` is left untouched.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

/// Lower-case hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestOutput {
  std::string path;
  std::string sha256;
};

/// One invocation of a pipeline stage.
struct ManifestEntry {
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json config;  // snapshot of every input parameter of the stage
  std::vector<std::string> inputs;
  std::vector<ManifestOutput> outputs;
};

/// Builds an output record by hashing the file at `path`.
ManifestOutput hashed_output(const std::filesystem::path& path);

/// Appends an entry to the JSON manifest at `path`, creating it if needed.
/// The manifest is rewritten atomically.
void append_manifest(const std::filesystem::path& path, const ManifestEntry& entry);

nlohmann::json to_json(const ManifestEntry& entry);

}  // namespace qrng
