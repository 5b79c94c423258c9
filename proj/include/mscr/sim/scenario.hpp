#pragma once
// Scenario files: papilla placement, noise, depth, model overrides, scripted
// operator parameters, and a tick-indexed event schedule.

#include <mscr/balloon.hpp>
#include <mscr/sim/command.hpp>

#include <fstream>
#include <sstream>
#include <vector>

namespace mscr::sim {

struct PapillaSpec {
  double distance = 0.040;              // m from the base of the bending section
  double bearing = 0.0;                 // rad from the base heading
  std::optional<double> duct_bearing;   // rad; defaults to the bearing
};

struct ScenarioNoise {
  double jitter_px = 0.0;
  double dropout = 0.0;
  double fbg_sd = 0.0;  // rad
};

/// Scripted stand-in for a human operator: reacts to a delayed view of the
/// angular error with a proportional yaw command, overshoots through a high
/// gain, and adds hand tremor to both yaw and translation.
struct OperatorModel {
  int delay_ticks = 8;
  double gain = 4.0;                // yaw axis per radian of perceived error
  double tremor_sd = 0.15;          // yaw axis units
  double jitter_sd = 0.15;          // translation axis units
  double threshold = deg2rad(5.0);  // advances while the perceived error is below this

  void validate() const {
    require(delay_ticks >= 0, "operator: delay_ticks must be >= 0");
    require(gain > 0.0 && threshold > 0.0, "operator: gain and threshold must be > 0");
    require(tremor_sd >= 0.0 && jitter_sd >= 0.0, "operator: noise must be >= 0");
  }
};

/// Hold force composition: the gripper's own grip plus the anchoring
/// balloon's contribution, expressed as a ratio of the grip force.
struct HoldModel {
  double grip_force = 0.32;  // N
  double anchor_ratio = 3.0;

  double hold_force(bool anchored) const { return grip_force * (anchored ? 1.0 + anchor_ratio : 1.0); }
};

enum class EventType { misalign, command };

struct ScenarioEvent {
  long tick = 0;
  EventType type = EventType::command;
  double angle = 0.0;  // misalign: rotation of the papilla about the tip, rad
  UserCommand command;
};

struct Scenario {
  std::string name = "default";
  std::uint64_t seed = 0;
  PapillaSpec papilla;
  ScenarioNoise noise;
  double target_depth = 0.075;  // m
  double timeout = 600.0;       // s
  PlantConfig plant;
  ControllerConfig controller;
  OperatorModel op;
  HoldModel hold;
  balloon::BalloonSpec balloon{.burst = balloon::BurstStats{80e3, 2e3}};
  double balloon_safety_factor = 1.5;
  std::vector<ScenarioEvent> events;

  void validate() const {
    plant.validate();
    controller.validate();
    op.validate();
    balloon.validate();
    require(target_depth > 0.0 && target_depth <= plant.catheter.length,
            "scenario: target depth must lie in (0, L]");
    require(timeout > 0.0, "scenario: timeout must be > 0");
    require(papilla.distance > plant.free_length, "scenario: papilla must lie beyond the bending section");
    require(balloon_safety_factor >= 1.0, "scenario: balloon safety factor must be >= 1");
  }
};

inline Scenario scenario_from_json(const nlohmann::json& doc) {
  const JsonView root(doc);
  root.object({"name", "seed", "papilla", "noise", "target_depth_mm", "timeout_s", "plant", "controller",
               "operator", "hold", "balloon", "events"});
  Scenario s;
  const auto positive = [](const JsonView& v, std::string_view key, double fallback) {
    if (!v.has(key)) return fallback;
    const double x = v.at(key).number();
    v.at(key).check(x > 0.0, "must be > 0");
    return x;
  };
  const auto non_negative = [](const JsonView& v, std::string_view key, double fallback) {
    if (!v.has(key)) return fallback;
    const double x = v.at(key).number();
    v.at(key).check(x >= 0.0, "must be >= 0");
    return x;
  };

  s.name = root.string("name", s.name);
  if (root.has("seed")) {
    const long seed = root.at("seed").integer();
    root.at("seed").check(seed >= 0, "must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  if (root.has("papilla")) {
    const auto p = root.at("papilla");
    p.object({"distance_mm", "bearing_deg", "duct_bearing_deg"});
    s.papilla.distance = positive(p, "distance_mm", s.papilla.distance * 1e3) * 1e-3;
    s.papilla.bearing = deg2rad(p.number("bearing_deg", 0.0));
    if (p.has("bearing_deg"))
      p.at("bearing_deg").check(std::abs(s.papilla.bearing) <= kPi / 2, "must lie in [-90, 90]");
    if (p.has("duct_bearing_deg")) s.papilla.duct_bearing = deg2rad(p.at("duct_bearing_deg").number());
  }
  if (root.has("noise")) {
    const auto n = root.at("noise");
    n.object({"jitter_px", "dropout", "fbg_sd_deg"});
    s.noise.jitter_px = non_negative(n, "jitter_px", 0.0);
    s.noise.dropout = non_negative(n, "dropout", 0.0);
    if (n.has("dropout")) n.at("dropout").check(s.noise.dropout <= 1.0, "must lie in [0, 1]");
    s.noise.fbg_sd = deg2rad(non_negative(n, "fbg_sd_deg", 0.0));
  }
  s.target_depth = positive(root, "target_depth_mm", 75.0) * 1e-3;
  s.timeout = positive(root, "timeout_s", s.timeout);
  if (root.has("plant")) {
    const auto p = root.at("plant");
    p.object({"lag_tau_s", "stiffness_factor", "free_length_mm", "capture_radius_mm", "standoff_min_m",
              "standoff_max_m", "b_min_mT", "b_max_mT", "calibration"});
    auto& c = s.plant;
    c.lag_tau = positive(p, "lag_tau_s", c.lag_tau);
    c.stiffness_factor = positive(p, "stiffness_factor", c.stiffness_factor);
    c.free_length = positive(p, "free_length_mm", c.free_length * 1e3) * 1e-3;
    c.capture_radius = positive(p, "capture_radius_mm", c.capture_radius * 1e3) * 1e-3;
    c.standoff.min = positive(p, "standoff_min_m", c.standoff.min);
    c.standoff.max = positive(p, "standoff_max_m", c.standoff.max);
    if (c.standoff.min >= c.standoff.max) p.fail("standoff_min_m must be < standoff_max_m");
    c.task.b_min = non_negative(p, "b_min_mT", c.task.b_min * 1e3) * 1e-3;
    c.task.b_max = positive(p, "b_max_mT", c.task.b_max * 1e3) * 1e-3;
    if (c.task.b_min > c.task.b_max) p.fail("b_min_mT must be <= b_max_mT");
    if (p.has("calibration")) {
      const auto t = p.at("calibration");
      t.array();
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto row = t.at(i);
        row.object({"b_mT", "angle_deg"});
        c.calibration.emplace_back(row.at("b_mT").number() * 1e-3, deg2rad(row.at("angle_deg").number()));
      }
      try {
        (void)c.deflection();
      } catch (const DomainError& e) {
        t.fail(e.what());
      }
    }
  }
  if (root.has("controller")) {
    const auto p = root.at("controller");
    p.object({"step_gain", "dls_damping", "null_gain", "max_step_mm", "max_step_rad", "align_threshold_deg",
              "advance_speed_mm_s", "fbg_tolerance_deg", "fbg_frames"});
    auto& c = s.controller;
    c.step_gain = positive(p, "step_gain", c.step_gain);
    if (p.has("step_gain")) p.at("step_gain").check(c.step_gain <= 1.0, "must lie in (0, 1]");
    c.dls_damping = positive(p, "dls_damping", c.dls_damping);
    c.null_gain = non_negative(p, "null_gain", c.null_gain);
    if (p.has("null_gain")) p.at("null_gain").check(c.null_gain <= 1.0, "must lie in [0, 1]");
    c.max_step_translation = positive(p, "max_step_mm", c.max_step_translation * 1e3) * 1e-3;
    c.max_step_rotation = positive(p, "max_step_rad", c.max_step_rotation);
    c.align_threshold = deg2rad(positive(p, "align_threshold_deg", rad2deg(c.align_threshold)));
    c.advance_speed = positive(p, "advance_speed_mm_s", c.advance_speed * 1e3) * 1e-3;
    c.fbg_tolerance = deg2rad(positive(p, "fbg_tolerance_deg", rad2deg(c.fbg_tolerance)));
    if (p.has("fbg_frames")) {
      c.fbg_frames = static_cast<int>(p.at("fbg_frames").integer());
      p.at("fbg_frames").check(c.fbg_frames >= 1, "must be >= 1");
    }
  }
  if (root.has("operator")) {
    const auto p = root.at("operator");
    p.object({"delay_ticks", "gain", "tremor_sd", "jitter_sd", "threshold_deg"});
    auto& o = s.op;
    if (p.has("delay_ticks")) {
      o.delay_ticks = static_cast<int>(p.at("delay_ticks").integer());
      p.at("delay_ticks").check(o.delay_ticks >= 0, "must be >= 0");
    }
    o.gain = positive(p, "gain", o.gain);
    o.tremor_sd = non_negative(p, "tremor_sd", o.tremor_sd);
    o.jitter_sd = non_negative(p, "jitter_sd", o.jitter_sd);
    o.threshold = deg2rad(positive(p, "threshold_deg", rad2deg(o.threshold)));
  }
  if (root.has("hold")) {
    const auto p = root.at("hold");
    p.object({"grip_force_n", "anchor_ratio"});
    s.hold.grip_force = positive(p, "grip_force_n", s.hold.grip_force);
    s.hold.anchor_ratio = non_negative(p, "anchor_ratio", s.hold.anchor_ratio);
  }
  if (root.has("balloon")) {
    const auto p = root.at("balloon");
    p.object({"burst_mean_kpa", "burst_sd_kpa", "safety_factor"});
    s.balloon.burst->mean = positive(p, "burst_mean_kpa", s.balloon.burst->mean * 1e-3) * 1e3;
    s.balloon.burst->sd = non_negative(p, "burst_sd_kpa", s.balloon.burst->sd * 1e-3) * 1e3;
    s.balloon_safety_factor = positive(p, "safety_factor", s.balloon_safety_factor);
    if (p.has("safety_factor")) p.at("safety_factor").check(s.balloon_safety_factor >= 1.0, "must be >= 1");
  }
  if (root.has("events")) {
    const auto ev = root.at("events");
    ev.array();
    long last = -1;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const auto e = ev.at(i);
      if (!e.raw().is_object()) e.fail("expected an object");
      ScenarioEvent out;
      out.tick = e.at("tick").integer();
      e.at("tick").check(out.tick >= 0, "must be >= 0");
      e.at("tick").check(out.tick >= last, "events must be ordered by tick");
      last = out.tick;
      if (e.at("type").string() == "misalign") {
        e.object({"tick", "type", "angle_deg"});
        out.type = EventType::misalign;
        out.angle = deg2rad(e.at("angle_deg").number());
      } else {
        out.type = EventType::command;
        out.command = command_from_json(e, {"tick"});
      }
      s.events.push_back(out);
    }
  }
  try {
    s.validate();
  } catch (const SchemaError&) {
    throw;
  } catch (const DomainError& e) {
    throw SchemaError("$", e.what());
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingDataError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(parse_json(ss.str()));
}

}  // namespace mscr::sim
