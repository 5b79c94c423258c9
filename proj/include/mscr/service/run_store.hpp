#pragma once
// Append-only persistence of finished runs: one summary line per run in
// <dir>/runs.jsonl, and the full event log of each run in <dir>/logs/<id>.jsonl.

#include <mscr/sim/metrics.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace mscr::service {

class StorageError : public Error {
 public:
  using Error::Error;
};

struct RunSummary {
  std::string id;
  std::string scenario;
  std::string mode;
  std::uint64_t seed = 0;
  sim::RunMetrics metrics;

  bool operator==(const RunSummary&) const = default;
};

inline nlohmann::json to_json(const RunSummary& r) {
  return {{"id", r.id}, {"scenario", r.scenario}, {"mode", r.mode}, {"seed", r.seed},
          {"metrics", sim::to_json(r.metrics)}};
}

inline RunSummary summary_from_json(const nlohmann::json& j) {
  RunSummary r;
  r.id = j.at("id").get<std::string>();
  r.scenario = j.at("scenario").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.metrics = sim::metrics_from_json(j.at("metrics"));
  return r;
}

struct RunFilter {
  std::optional<std::string> mode;
  std::optional<std::string> scenario;

  bool matches(const RunSummary& r) const {
    return (!mode || *mode == r.mode) && (!scenario || *scenario == r.scenario);
  }
};

class RunStore {
 public:
  explicit RunStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path summary_path() const { return dir_ / "runs.jsonl"; }
  std::filesystem::path log_path(const std::string& id) const { return dir_ / "logs" / (id + ".jsonl"); }

  /// Creates the directories; throws StorageError when that is impossible.
  void ensure() const {
    std::error_code ec;
    std::filesystem::create_directories(dir_ / "logs", ec);
    if (ec || !std::filesystem::is_directory(dir_ / "logs"))
      throw StorageError("run store unavailable at '" + dir_.string() + "': " + ec.message());
  }

  void append(const RunSummary& r) {
    std::lock_guard lock(mu_);
    ensure();
    std::ofstream out(summary_path(), std::ios::app);
    if (!out) throw StorageError("cannot append to '" + summary_path().string() + "'");
    out << to_json(r).dump() << '\n';
    out.flush();
    if (!out) throw StorageError("write failed on '" + summary_path().string() + "'");
  }

  /// Summaries in append order. A missing store reads as empty; an unreadable
  /// one is an error.
  std::vector<RunSummary> fetch(const RunFilter& filter = {}) const {
    std::lock_guard lock(mu_);
    std::vector<RunSummary> out;
    std::error_code ec;
    if (std::filesystem::exists(dir_, ec) && !std::filesystem::is_directory(dir_, ec))
      throw StorageError("run store path '" + dir_.string() + "' is not a directory");
    if (!std::filesystem::exists(summary_path(), ec)) return out;
    std::ifstream in(summary_path());
    if (!in) throw StorageError("cannot read '" + summary_path().string() + "'");
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      RunSummary r;
      try {
        r = summary_from_json(nlohmann::json::parse(line));
      } catch (const std::exception& e) {
        throw StorageError("corrupt run store line " + std::to_string(lineno) + ": " + e.what());
      }
      if (filter.matches(r)) out.push_back(std::move(r));
    }
    return out;
  }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

}  // namespace mscr::service
