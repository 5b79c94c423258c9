#pragma once
// Wire messages exchanged with session clients. Each frame on the socket is a
// 4-byte big-endian length followed by one UTF-8 JSON envelope:
//   {"kind": ..., "session": ..., "tick": ..., "payload": {...}}

#include <mscr/json_check.hpp>
#include <mscr/sim/command.hpp>
#include <mscr/sim/fsm.hpp>
#include <mscr/sim/metrics.hpp>

#include <cstdint>
#include <string>

namespace mscr::service {

enum class Kind { state, command, event, error, metrics, request, response };

inline std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::state: return "state";
    case Kind::command: return "command";
    case Kind::event: return "event";
    case Kind::error: return "error";
    case Kind::metrics: return "metrics";
    case Kind::request: return "request";
    case Kind::response: return "response";
  }
  return "unknown";
}

inline std::optional<Kind> kind_from_name(std::string_view s) {
  for (auto k : {Kind::state, Kind::command, Kind::event, Kind::error, Kind::metrics, Kind::request,
                 Kind::response})
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

struct WireMessage {
  Kind kind = Kind::event;
  std::string session;  // empty for messages not tied to a session
  long tick = 0;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const WireMessage& o) const {
    return kind == o.kind && session == o.session && tick == o.tick && payload == o.payload;
  }
};

namespace error_code {
inline constexpr const char* unknown_session = "unknown_session";
inline constexpr const char* rate_limited = "rate_limited";
inline constexpr const char* schema = "schema";
inline constexpr const char* bad_request = "bad_request";
inline constexpr const char* storage_unavailable = "storage_unavailable";
inline constexpr const char* internal = "internal";
}  // namespace error_code

inline WireMessage error_message(const std::string& session, const std::string& code, const std::string& message,
                                 const std::string& path = {}, const nlohmann::json& request_id = nullptr) {
  WireMessage m{Kind::error, session, 0, {{"code", code}, {"message", message}}};
  if (!path.empty()) m.payload["path"] = path;
  if (!request_id.is_null()) m.payload["request_id"] = request_id;
  return m;
}

namespace detail {

inline void check_state_payload(const JsonView& p, long tick) {
  p.object({"type", "tick", "t", "phase", "mode", "epm_p", "epm_m", "b", "b_mag", "tip_angle", "theta_err",
            "insertion", "fbg", "theta_est", "advancing", "captured", "balloon_inflated", "balloon_pressure",
            "gripper_closed"});
  p.at("tick").check(p.at("tick").integer() == tick, "payload tick must match the envelope tick");
  try {
    (void)sim::phase_from_name(p.at("phase").string());
  } catch (const SchemaError&) {
    throw;
  } catch (const DomainError& e) {
    p.at("phase").fail(e.what());
  }
  const auto mode = p.at("mode").string();
  p.at("mode").check(mode == "autonomous" || mode == "manual" || mode == "hold", "unknown control mode");
  for (const char* k : {"t", "b_mag", "tip_angle", "insertion", "fbg", "theta_est", "balloon_pressure"})
    (void)p.at(k).number();
  for (const char* k : {"epm_p", "epm_m", "b"}) {
    const auto v = p.at(k);
    v.array();
    v.check(v.size() == 3, "expected three components");
    for (std::size_t i = 0; i < 3; ++i) (void)v.at(i).number();
  }
  if (!p.at("theta_err").raw().is_null()) (void)p.at("theta_err").number();
  for (const char* k : {"advancing", "captured", "balloon_inflated", "gripper_closed"}) (void)p.at(k).boolean();
}

inline void check_metrics_payload(const JsonView& p) {
  p.object({"insertion_time", "epm_path_length", "epm_turning_sum", "success", "override_events", "fbg_flags",
            "pause_episodes", "rejected_commands", "advance_time", "max_b_mag", "hold_force", "final_insertion",
            "ticks", "end_reason"});
  for (const char* k : {"insertion_time", "epm_path_length", "epm_turning_sum", "advance_time", "max_b_mag",
                        "hold_force", "final_insertion"}) {
    p.at(k).check(p.at(k).number() >= 0.0, "must be >= 0");
  }
  for (const char* k : {"override_events", "fbg_flags", "pause_episodes", "rejected_commands", "ticks"})
    p.at(k).check(p.at(k).integer() >= 0, "must be >= 0");
  (void)p.at("success").boolean();
  (void)p.at("end_reason").string();
}

}  // namespace detail

/// Validates an envelope and its payload against the schema for its kind.
inline WireMessage message_from_json(const nlohmann::json& j) {
  const JsonView v(j);
  v.object({"kind", "session", "tick", "payload"});
  const auto kname = v.at("kind").string();
  const auto kind = kind_from_name(kname);
  if (!kind) v.at("kind").fail("unknown message kind '" + kname + "'");
  WireMessage m;
  m.kind = *kind;
  m.session = v.string("session", "");
  m.tick = v.integer("tick", 0);
  v.check(m.tick >= 0, "tick must be >= 0");
  const auto p = v.at("payload");
  if (!p.raw().is_object()) p.fail("expected an object");
  switch (m.kind) {
    case Kind::state: detail::check_state_payload(p, m.tick); break;
    case Kind::command: (void)sim::command_from_json(p); break;
    case Kind::metrics: detail::check_metrics_payload(p); break;
    case Kind::event: (void)p.at("type").string(); break;
    case Kind::error:
      (void)p.at("code").string();
      (void)p.at("message").string();
      break;
    case Kind::request:
    case Kind::response: (void)p.at("op").string(); break;
  }
  m.payload = p.raw();
  return m;
}

inline nlohmann::json to_json(const WireMessage& m) {
  nlohmann::json j{{"kind", std::string(kind_name(m.kind))}, {"tick", m.tick}, {"payload", m.payload}};
  if (!m.session.empty()) j["session"] = m.session;
  return j;
}

inline std::string encode_frame(const WireMessage& m) {
  const std::string body = to_json(m).dump();
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string out(4, '\0');
  out[0] = static_cast<char>((n >> 24) & 0xff);
  out[1] = static_cast<char>((n >> 16) & 0xff);
  out[2] = static_cast<char>((n >> 8) & 0xff);
  out[3] = static_cast<char>(n & 0xff);
  return out + body;
}

inline constexpr std::uint32_t kMaxFrameBytes = 16u << 20;

inline std::uint32_t decode_length(const unsigned char* b) {
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

/// Decodes one complete frame (header included).
inline WireMessage decode_frame(std::string_view frame) {
  if (frame.size() < 4) throw SchemaError("$", "frame shorter than its length header");
  const auto n = decode_length(reinterpret_cast<const unsigned char*>(frame.data()));
  if (n != frame.size() - 4) throw SchemaError("$", "frame length header does not match body");
  return message_from_json(parse_json(frame.substr(4)));
}

}  // namespace mscr::service
