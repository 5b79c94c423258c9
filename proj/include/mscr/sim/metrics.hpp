#pragma once
// Run metrics computed from the JSONL event log. The live session feeds the
// same accumulator with the events it writes, so a replay of the log gives
// identical numbers.

#include <mscr/common.hpp>

#include <json.hpp>

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace mscr::sim {

struct RunMetrics {
  double insertion_time = 0.0;   // s
  double epm_path_length = 0.0;  // m
  double epm_turning_sum = 0.0;  // rad
  bool success = false;
  int override_events = 0;
  int fbg_flags = 0;
  int pause_episodes = 0;
  int rejected_commands = 0;
  double advance_time = 0.0;     // s spent in the ADVANCE phase
  double max_b_mag = 0.0;        // T
  double hold_force = 0.0;       // N at the end of the run
  double final_insertion = 0.0;  // m
  long ticks = 0;
  std::string end_reason;

  bool operator==(const RunMetrics&) const = default;
};

inline nlohmann::json to_json(const RunMetrics& m) {
  return {{"insertion_time", m.insertion_time}, {"epm_path_length", m.epm_path_length},
          {"epm_turning_sum", m.epm_turning_sum}, {"success", m.success},
          {"override_events", m.override_events}, {"fbg_flags", m.fbg_flags},
          {"pause_episodes", m.pause_episodes}, {"rejected_commands", m.rejected_commands},
          {"advance_time", m.advance_time}, {"max_b_mag", m.max_b_mag}, {"hold_force", m.hold_force},
          {"final_insertion", m.final_insertion}, {"ticks", m.ticks}, {"end_reason", m.end_reason}};
}

inline RunMetrics metrics_from_json(const nlohmann::json& j) {
  RunMetrics m;
  m.insertion_time = j.at("insertion_time").get<double>();
  m.epm_path_length = j.at("epm_path_length").get<double>();
  m.epm_turning_sum = j.at("epm_turning_sum").get<double>();
  m.success = j.at("success").get<bool>();
  m.override_events = j.at("override_events").get<int>();
  m.fbg_flags = j.at("fbg_flags").get<int>();
  m.pause_episodes = j.at("pause_episodes").get<int>();
  m.rejected_commands = j.at("rejected_commands").get<int>();
  m.advance_time = j.at("advance_time").get<double>();
  m.max_b_mag = j.at("max_b_mag").get<double>();
  m.hold_force = j.at("hold_force").get<double>();
  m.final_insertion = j.at("final_insertion").get<double>();
  m.ticks = j.at("ticks").get<long>();
  m.end_reason = j.at("end_reason").get<std::string>();
  return m;
}

/// Commands that count as a human taking over from the automation.
inline bool is_override_command(const std::string& type) {
  return type == "hold" || type == "abort" || type == "set_mode";
}

class MetricsAccumulator {
 public:
  void consume(const nlohmann::json& e) {
    const auto& type = e.at("type").get_ref<const std::string&>();
    if (type == "header") {
      dt_ = e.at("dt").get<double>();
      grip_ = e.at("grip_force").get<double>();
      anchor_ = e.at("anchor_ratio").get<double>();
      last_p_ = read3(e.at("epm_p"));
      m_.hold_force = grip_;
    } else if (type == "state") {
      const Vec3 p = read3(e.at("epm_p"));
      if (last_p_) {
        const Vec3 d = p - *last_p_;
        const double n = d.norm();
        if (n > 0.0) {
          m_.epm_path_length += n;
          if (last_step_) m_.epm_turning_sum += std::atan2(last_step_->cross(d).norm(), last_step_->dot(d));
          last_step_ = d;
        }
      }
      last_p_ = p;
      m_.max_b_mag = std::max(m_.max_b_mag, e.at("b_mag").get<double>());
      if (e.at("phase").get_ref<const std::string&>() == "ADVANCE") ++advance_ticks_;
      m_.advance_time = static_cast<double>(advance_ticks_) * dt_;
      m_.final_insertion = e.at("insertion").get<double>();
      m_.hold_force = grip_ * (e.at("balloon_inflated").get<bool>() ? 1.0 + anchor_ : 1.0);
      ++m_.ticks;
    } else if (type == "phase") {
      if (e.at("to").get_ref<const std::string&>() == "PAUSE_REALIGN") ++m_.pause_episodes;
    } else if (type == "fbg_flag") {
      ++m_.fbg_flags;
    } else if (type == "command") {
      if (is_override_command(e.at("command").at("type").get<std::string>())) ++m_.override_events;
    } else if (type == "rejected") {
      ++m_.rejected_commands;
    } else if (type == "end") {
      m_.success = e.at("success").get<bool>();
      m_.insertion_time = e.at("t").get<double>();
      m_.end_reason = e.at("reason").get<std::string>();
      ended_ = true;
    }
  }

  const RunMetrics& metrics() const { return m_; }
  bool ended() const { return ended_; }

 private:
  static Vec3 read3(const nlohmann::json& a) {
    return {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
  }

  RunMetrics m_;
  double dt_ = 0.0;
  double grip_ = 0.0;
  double anchor_ = 0.0;
  long advance_ticks_ = 0;
  std::optional<Vec3> last_p_;
  std::optional<Vec3> last_step_;
  bool ended_ = false;
};

/// Recomputes metrics from a JSONL log. Tick indices must not decrease.
inline RunMetrics replay_metrics(std::istream& in) {
  MetricsAccumulator acc;
  std::string line;
  long lineno = 0, last_tick = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json e;
    try {
      e = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& err) {
      throw DomainError("log line " + std::to_string(lineno) + ": " + err.what());
    }
    const long tick = e.at("tick").get<long>();
    if (tick < last_tick) throw DomainError("log line " + std::to_string(lineno) + ": tick decreased");
    last_tick = tick;
    acc.consume(e);
  }
  if (!acc.ended()) throw MissingDataError("log has no end event");
  return acc.metrics();
}

}  // namespace mscr::sim
