#include "qrng/manifest.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "qrng/error.hpp"

namespace qrng {
namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  return tmp;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path() && !std::filesystem::exists(path.parent_path()))
    throw IoError("output directory does not exist: " + path.parent_path().string());

  const auto tmp = temp_sibling(path);
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
      writer(out);
      out.flush();
      if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw;
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  write_file_atomic(path, [contents](std::ostream& out) {
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  });
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 initialisation failed");

  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);

  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
  return hex.str();
}

ManifestOutput hashed_output(const std::filesystem::path& path) {
  return {path.string(), sha256_file(path)};
}

nlohmann::json to_json(const ManifestEntry& entry) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& o : entry.outputs) outputs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  return {{"command", entry.command},   {"seed", entry.seed},
          {"config", entry.config},     {"inputs", entry.inputs},
          {"outputs", outputs},         {"tool_version", std::string(kToolVersion)}};
}

void append_manifest(const std::filesystem::path& path, const ManifestEntry& entry) {
  nlohmann::json manifest = {{"tool_version", std::string(kToolVersion)},
                             {"runs", nlohmann::json::array()}};
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    try {
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 0);
    }
    if (!manifest.contains("runs") || !manifest["runs"].is_array())
      throw ParseError("manifest has no 'runs' array", 0);
  }
  manifest["runs"].push_back(to_json(entry));
  write_file_atomic(path, manifest.dump(2) + "\n");
}

}  // namespace qrng
