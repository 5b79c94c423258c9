#pragma once
// Operator commands: joystick axes, phase requests, and balloon/gripper actions.

#include <mscr/json_check.hpp>
#include <mscr/sim/controller.hpp>

#include <array>
#include <string>

namespace mscr::sim {

/// Normalized joystick axes in [-1, 1]. Translation and rotation are scaled
/// by the controller's per-tick pose limits; advance by the advance speed.
struct Axes {
  std::array<double, 3> translate{0.0, 0.0, 0.0};
  std::array<double, 3> rotate{0.0, 0.0, 0.0};
  double advance = 0.0;

  bool is_zero() const {
    for (int i = 0; i < 3; ++i)
      if (translate[i] != 0.0 || rotate[i] != 0.0) return false;
    return advance == 0.0;
  }
  bool pose_is_zero() const {
    for (int i = 0; i < 3; ++i)
      if (translate[i] != 0.0 || rotate[i] != 0.0) return false;
    return true;
  }
  bool operator==(const Axes&) const = default;
};

enum class CommandKind { noop, axes, hold, resume, abort, set_mode, inflate, deflate, gripper, drug_release };

inline std::string_view command_name(CommandKind k) {
  switch (k) {
    case CommandKind::noop: return "noop";
    case CommandKind::axes: return "axes";
    case CommandKind::hold: return "hold";
    case CommandKind::resume: return "resume";
    case CommandKind::abort: return "abort";
    case CommandKind::set_mode: return "set_mode";
    case CommandKind::inflate: return "inflate";
    case CommandKind::deflate: return "deflate";
    case CommandKind::gripper: return "gripper";
    case CommandKind::drug_release: return "drug_release";
  }
  return "unknown";
}

inline std::optional<CommandKind> command_from_name(std::string_view s) {
  for (auto k : {CommandKind::noop, CommandKind::axes, CommandKind::hold, CommandKind::resume,
                 CommandKind::abort, CommandKind::set_mode, CommandKind::inflate, CommandKind::deflate,
                 CommandKind::gripper, CommandKind::drug_release})
    if (command_name(k) == s) return k;
  return std::nullopt;
}

struct UserCommand {
  CommandKind kind = CommandKind::noop;
  Axes axes;
  ControlMode mode = ControlMode::autonomous;  // set_mode
  double pressure = 0.0;                       // Pa, inflate
  bool gripper_closed = false;                 // gripper

  static UserCommand of(CommandKind k) { return UserCommand{k, {}, ControlMode::autonomous, 0.0, false}; }
  static UserCommand move(const Axes& a) { return UserCommand{CommandKind::axes, a, ControlMode::autonomous, 0.0, false}; }
  bool operator==(const UserCommand&) const = default;
};

inline nlohmann::json to_json(const UserCommand& c) {
  nlohmann::json j{{"type", std::string(command_name(c.kind))}};
  switch (c.kind) {
    case CommandKind::axes:
      j["axes"] = {{"translate", c.axes.translate}, {"rotate", c.axes.rotate}, {"advance", c.axes.advance}};
      break;
    case CommandKind::set_mode: j["mode"] = std::string(mode_name(c.mode)); break;
    case CommandKind::inflate: j["pressure_pa"] = c.pressure; break;
    case CommandKind::gripper: j["closed"] = c.gripper_closed; break;
    default: break;
  }
  return j;
}

namespace detail {
inline std::array<double, 3> axis_triple(const JsonView& v) {
  v.array();
  v.check(v.size() == 3, "expected three components");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = v.at(i).number();
    v.at(i).check(out[i] >= -1.0 && out[i] <= 1.0, "axis value must lie in [-1, 1]");
  }
  return out;
}
}  // namespace detail

/// Parses a command object. `extra` lists keys owned by an enclosing record
/// (for example a scenario event's tick) that are allowed alongside.
inline UserCommand command_from_json(const JsonView& v, std::initializer_list<std::string_view> extra = {}) {
  if (!v.raw().is_object()) v.fail("expected an object");
  const auto type = v.at("type").string();
  const auto kind = command_from_name(type);
  if (!kind) v.at("type").fail("unknown command type '" + type + "'");
  UserCommand c = UserCommand::of(*kind);
  const auto allow = [&](std::initializer_list<std::string_view> own) {
    for (const auto& [k, _] : v.raw().items()) {
      bool ok = k == "type";
      for (auto a : own) ok = ok || a == k;
      for (auto a : extra) ok = ok || a == k;
      if (!ok) throw SchemaError(v.path() + "." + k, "unknown key");
    }
  };
  switch (*kind) {
    case CommandKind::axes: {
      allow({"axes"});
      const auto a = v.at("axes");
      a.object({"translate", "rotate", "advance"});
      if (a.has("translate")) c.axes.translate = detail::axis_triple(a.at("translate"));
      if (a.has("rotate")) c.axes.rotate = detail::axis_triple(a.at("rotate"));
      c.axes.advance = a.number("advance", 0.0);
      if (a.has("advance"))
        a.at("advance").check(c.axes.advance >= -1.0 && c.axes.advance <= 1.0, "axis value must lie in [-1, 1]");
      break;
    }
    case CommandKind::set_mode: {
      allow({"mode"});
      try {
        c.mode = mode_from_name(v.at("mode").string());
      } catch (const SchemaError&) {
        throw;
      } catch (const DomainError& e) {
        v.at("mode").fail(e.what());
      }
      break;
    }
    case CommandKind::inflate:
      allow({"pressure_pa"});
      c.pressure = v.at("pressure_pa").number();
      v.at("pressure_pa").check(c.pressure >= 0.0, "pressure must be >= 0");
      break;
    case CommandKind::gripper:
      allow({"closed"});
      c.gripper_closed = v.at("closed").boolean();
      break;
    default: allow({}); break;
  }
  return c;
}

}  // namespace mscr::sim
