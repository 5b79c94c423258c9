#pragma once
// Run directories for batch commands: out/<command>/<label>/ holding the
// command's files, a manifest.json that depends only on (config, seeds,
// outputs), and a metadata.json that carries wall-clock timestamps.

#include <mscr/common.hpp>

#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

namespace mscr::cli {

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return o.str();
}

/// Shortest decimal that round-trips, so CSV cells are stable and exact.
inline std::string num(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string utc_stamp(std::chrono::system_clock::time_point t, bool compact) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, compact ? "%Y%m%dT%H%M%SZ" : "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed on '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

/// Files produced by a command, keyed by path relative to the run directory.
using Outputs = std::map<std::string, std::string>;

struct RunRecord {
  std::string command;
  nlohmann::json config;  // resolved config restricted to the command's keys
  std::vector<long> seeds;
};

inline std::string config_hash(const nlohmann::json& config) { return sha256_hex(config.dump()); }

inline nlohmann::json manifest(const RunRecord& r, const Outputs& files) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [name, body] : files)
    list.push_back({{"path", name}, {"bytes", body.size()}, {"sha256", sha256_hex(body)}});
  return {{"command", r.command},
          {"config", r.config},
          {"config_hash", config_hash(r.config)},
          {"seeds", r.seeds},
          {"files", list}};
}

/// Writes outputs, manifest.json and metadata.json under root/<command>/<label>.
/// Stale files from an earlier run with the same label are removed first.
inline std::filesystem::path write_run(const std::filesystem::path& root, const std::string& label,
                                       const RunRecord& record, const Outputs& files,
                                       std::chrono::system_clock::time_point started,
                                       const std::vector<std::string>& argv) {
  require(!label.empty() && label.find('/') == std::string::npos && label != "." && label != "..",
          "label must be a plain directory name");
  const auto dir = root / record.command / label;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  for (const auto& [name, body] : files) write_atomic(dir / name, body);
  write_atomic(dir / "manifest.json", manifest(record, files).dump(2) + "\n");
  const auto finished = std::chrono::system_clock::now();
  const nlohmann::json meta{
      {"started_utc", utc_stamp(started, false)},
      {"finished_utc", utc_stamp(finished, false)},
      {"wall_seconds", std::chrono::duration<double>(finished - started).count()},
      {"argv", argv}};
  write_atomic(dir / "metadata.json", meta.dump(2) + "\n");
  return dir;
}

}  // namespace mscr::cli
