#pragma once
// One simulated procedure: plant, perception, controller or operator, phase
// machine, FBG monitor, and the event log. A tick runs
//   commands -> perceive -> phase -> command -> plant -> FBG -> log.

#include <mscr/sim/fsm.hpp>
#include <mscr/sim/metrics.hpp>
#include <mscr/sim/scenario.hpp>

#include <deque>
#include <functional>
#include <ostream>
#include <random>

namespace mscr::sim {

enum class RunMode { autonomous, operator_model, manual };

inline std::string_view run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::autonomous: return "autonomous";
    case RunMode::operator_model: return "operator";
    case RunMode::manual: return "manual";
  }
  return "unknown";
}

inline RunMode run_mode_from_name(std::string_view s) {
  if (s == "autonomous") return RunMode::autonomous;
  if (s == "operator") return RunMode::operator_model;
  if (s == "manual") return RunMode::manual;
  throw DomainError("unknown run mode '" + std::string(s) + "' (autonomous, operator, manual)");
}

struct ManualResult {
  std::optional<magnetics::DipoleSource> epm;
  double advance_speed = 0.0;
  std::optional<std::string> rejected;
};

/// Joystick axes to a pose increment under the same per-tick limits and field
/// envelope as the autonomous controller. Unsafe commands are rejected whole.
inline ManualResult manual_step(const PlantConfig& cfg, const ControllerConfig& cc,
                                const magnetics::DipoleSource& epm, const Axes& axes) {
  ManualResult r;
  for (int i = 0; i < 3; ++i) {
    if (!(std::abs(axes.translate[i]) <= 1.0 && std::abs(axes.rotate[i]) <= 1.0)) {
      r.rejected = "axis value outside [-1, 1]";
      return r;
    }
  }
  if (!(std::abs(axes.advance) <= 1.0)) {
    r.rejected = "advance axis outside [-1, 1]";
    return r;
  }
  if (!axes.pose_is_zero()) {
    PoseDelta d;
    d.translation = cc.max_step_translation * Vec3(axes.translate[0], axes.translate[1], axes.translate[2]);
    d.rotation = cc.max_step_rotation * Vec3(axes.rotate[0], axes.rotate[1], axes.rotate[2]);
    d = clamp_step(d, cc.max_step_translation, cc.max_step_rotation);
    const auto next = apply(epm, d);
    const double dist = (next.position - cfg.field_point).norm();
    if (dist < cfg.standoff.min || dist > cfg.standoff.max) {
      r.rejected = "EPM standoff " + std::to_string(dist) + " m outside limits";
      return r;
    }
    const double b = field_at_catheter(cfg, next).norm();
    if (b > cfg.task.b_max) {
      r.rejected = "field " + std::to_string(b * 1e3) + " mT would exceed b_max";
      return r;
    }
    r.epm = next;
  }
  r.advance_speed = axes.advance * cc.advance_speed;
  return r;
}

struct InflationResult {
  double pressure = 0.0;
  bool clamped = false;
};

inline InflationResult guard_inflation(double requested, double p_max_safe) {
  require(requested >= 0.0, "inflation pressure must be >= 0");
  if (requested > p_max_safe) return {p_max_safe, true};
  return {requested, false};
}

/// Scripted operator: proportional yaw on a delayed error, tremor on yaw and
/// translation, advances while its perceived error is small.
class ScriptedOperator {
 public:
  explicit ScriptedOperator(OperatorModel m) : m_(m) {}

  /// Always consumes three normal variates so the random stream does not
  /// depend on what the operator sees.
  Axes act(std::optional<double> theta_err, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double tremor = n(rng), jx = n(rng), jy = n(rng);
    history_.push_back(theta_err);
    if (static_cast<int>(history_.size()) > m_.delay_ticks + 1) history_.pop_front();
    Axes a;
    const auto seen = history_.front();
    if (!seen || static_cast<int>(history_.size()) <= m_.delay_ticks) return a;
    a.rotate[2] = std::clamp(m_.gain * *seen + m_.tremor_sd * tremor, -1.0, 1.0);
    a.translate[0] = std::clamp(m_.jitter_sd * jx, -1.0, 1.0);
    a.translate[1] = std::clamp(m_.jitter_sd * jy, -1.0, 1.0);
    a.advance = std::abs(*seen) < m_.threshold ? 1.0 : 0.0;
    return a;
  }

 private:
  OperatorModel m_;
  std::deque<std::optional<double>> history_;
};

inline nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

struct RunResult {
  RunMetrics metrics;
  std::vector<nlohmann::json> events;

  void write_log(std::ostream& out) const {
    for (const auto& e : events) out << e.dump() << '\n';
  }
};

class Session {
 public:
  using Sink = std::function<void(const nlohmann::json&)>;

  Session(Scenario sc, RunMode mode, Phase initial = Phase::align)
      : sc_(std::move(sc)),
        run_mode_(mode),
        control_(mode == RunMode::autonomous ? ControlMode::autonomous : ControlMode::manual),
        phase_(initial),
        model_(sc_.plant.deflection()),
        rng_(sc_.seed),
        fbg_(sc_.controller.fbg_tolerance, sc_.controller.fbg_frames),
        operator_(sc_.op) {
    sc_.validate();
    require(!is_terminal(initial), "session cannot start in a terminal phase");
    p_max_safe_ = balloon::safe_range(sc_.balloon, sc_.balloon_safety_factor).p_max_safe;
    state_.epm = initial_epm(sc_.plant);
    state_.papilla = sc_.papilla.distance * Vec2(std::cos(sc_.papilla.bearing), std::sin(sc_.papilla.bearing));
    const double duct = sc_.papilla.duct_bearing.value_or(sc_.papilla.bearing);
    state_.duct_direction = Vec2(std::cos(duct), std::sin(duct));
    state_.tip_angle = steady_angle(sc_.plant, model_, state_.epm);
    ctl_.theta_estimate = model_.angle_for_field(field_at_catheter(sc_.plant, state_.epm).y());
  }

  /// Receives every event as it is logged (after the session stores it).
  void set_sink(Sink s) { sink_ = std::move(s); }
  void set_keep_events(bool keep) { keep_events_ = keep; }

  const Scenario& scenario() const { return sc_; }
  RunMode run_mode() const { return run_mode_; }
  ControlMode control_mode() const { return control_; }
  Phase phase() const { return phase_; }
  const PlantState& state() const { return state_; }
  long tick() const { return tick_; }
  bool finished() const { return finished_; }
  double p_max_safe() const { return p_max_safe_; }
  const RunMetrics& metrics() const { return acc_.metrics(); }
  const std::vector<nlohmann::json>& events() const { return events_; }
  const std::optional<nlohmann::json>& latest_state() const { return latest_state_; }

  /// Queues a command for the next tick and returns that tick's index.
  long enqueue(const UserCommand& c) {
    if (finished_) throw DomainError("session has ended");
    queue_.push_back(c);
    return tick_;
  }

  void step() {
    if (finished_) return;
    if (tick_ == 0 && !header_written_) write_header();
    const auto& cfg = sc_.plant;
    const auto& cc = sc_.controller;

    TickFlags flags;
    while (event_cursor_ < sc_.events.size() && sc_.events[event_cursor_].tick <= tick_) {
      const auto& ev = sc_.events[event_cursor_++];
      if (ev.type == EventType::misalign) {
        misalign(ev.angle);
      } else {
        apply_command(ev.command, "scenario", flags);
      }
    }
    while (!queue_.empty()) {
      const UserCommand c = queue_.front();
      queue_.pop_front();
      apply_command(c, "queue", flags);
    }

    // Perceive.
    const auto m = markers(cfg, state_);
    const double ppm = cc.pixels_per_meter;
    const perception::TrueScene scene{ppm * m.marker1, ppm * m.marker2, ppm * m.target, true};
    const perception::NoiseSpec noise{sc_.noise.jitter_px, sc_.noise.dropout, 24.0, 0.85, 0.05};
    const auto detections = perception::synth_detect(scene, noise, rng_);
    const auto theta_err = measured_error(detections);

    // Phase.
    FsmInputs in;
    in.theta_err = theta_err;
    in.interrupt = flags.interrupt;
    in.resume = flags.resume;
    in.abort = flags.abort;
    in.depth_reached = state_.insertion_length >= sc_.target_depth - 1e-9;
    set_phase(insertion_fsm(phase_, in, cc.align_threshold));
    if (is_terminal(phase_)) {
      finish(phase_ == Phase::done, phase_ == Phase::done ? "target depth reached" : "aborted");
      return;
    }

    // Command.
    const bool active = phase_ == Phase::align || phase_ == Phase::advance || phase_ == Phase::pause_realign;
    const Axes operator_axes = operator_.act(theta_err, rng_);
    PlantInput input;
    bool advancing = false;
    if (active && control_ == ControlMode::autonomous) {
      const auto cmd = autonomous_step(cfg, model_, cc, ctl_, state_.epm, detections);
      if (cmd.hold) {
        if (cmd.reason != last_hold_reason_) log_warning("controller hold: " + cmd.reason);
        last_hold_reason_ = cmd.reason;
      } else {
        last_hold_reason_.clear();
        if (!cmd.delta.is_zero()) input.epm = apply(state_.epm, cmd.delta);
        if (phase_ == Phase::advance) {
          input.advance_speed = cc.advance_speed;
          advancing = true;
        }
      }
    } else if (active && control_ == ControlMode::manual) {
      const Axes axes = run_mode_ == RunMode::operator_model ? operator_axes : flags.axes;
      const auto r = manual_step(cfg, cc, state_.epm, axes);
      if (r.rejected) {
        log({{"type", "rejected"}, {"reason", *r.rejected}});
      } else {
        input.epm = r.epm;
        input.advance_speed = r.advance_speed;
        advancing = r.advance_speed != 0.0;
      }
    }

    // Plant.
    try {
      state_ = step_plant(cfg, model_, state_, input);
    } catch (const SafetyStop& e) {
      log_warning(std::string("safety stop: ") + e.what());
      set_phase(Phase::abort);
      finish(false, "safety stop");
      return;
    }
    state_.t = static_cast<double>(tick_ + 1) * kTickDt;
    update_estimate(cfg, model_, ctl_, state_.epm);

    // FBG consistency.
    std::normal_distribution<double> n(0.0, 1.0);
    const double fbg = state_.tip_angle + sc_.noise.fbg_sd * n(rng_);
    if (fbg_.update(ctl_.theta_estimate, fbg)) {
      log({{"type", "fbg_flag"}, {"commanded", ctl_.theta_estimate}, {"measured", fbg}});
      set_phase(Phase::hold);
    }

    log_state(theta_err, fbg, advancing);
    ++tick_;
    if (static_cast<double>(tick_) * kTickDt >= sc_.timeout - 1e-12) finish(false, "timeout");
  }

  RunResult run() {
    while (!finished_) step();
    return {acc_.metrics(), events_};
  }

 private:
  struct TickFlags {
    bool interrupt = false;
    bool resume = false;
    bool abort = false;
    Axes axes;
  };

  void write_header() {
    header_written_ = true;
    log({{"type", "header"},
         {"scenario", sc_.name},
         {"seed", sc_.seed},
         {"mode", std::string(run_mode_name(run_mode_))},
         {"dt", kTickDt},
         {"b_max", sc_.plant.task.b_max},
         {"target_depth", sc_.target_depth},
         {"p_max_safe", p_max_safe_},
         {"grip_force", sc_.hold.grip_force},
         {"anchor_ratio", sc_.hold.anchor_ratio},
         {"epm_p", vec_json(state_.epm.position)},
         {"epm_m", vec_json(state_.epm.moment_direction)},
         {"phase", std::string(phase_name(phase_))}});
  }

  void misalign(double angle) {
    const Vec2 tip = tip_position(sc_.plant, state_.base, state_.tip_angle);
    const Eigen::Rotation2Dd r(angle);
    state_.papilla = tip + r * (state_.papilla - tip);
    state_.duct_direction = r * state_.duct_direction;
    log({{"type", "scripted"}, {"event", "misalign"}, {"angle", angle}});
  }

  void apply_command(const UserCommand& c, const char* source, TickFlags& f) {
    log({{"type", "command"}, {"source", source}, {"command", to_json(c)}});
    switch (c.kind) {
      case CommandKind::noop: break;
      case CommandKind::axes:
        if (control_ != ControlMode::manual || run_mode_ == RunMode::operator_model) {
          log({{"type", "rejected"}, {"reason", "axes need manual mode"}});
        } else {
          f.axes = c.axes;
        }
        break;
      case CommandKind::hold: f.interrupt = true; break;
      case CommandKind::resume: f.resume = true; break;
      case CommandKind::abort: f.abort = true; break;
      case CommandKind::set_mode:
        if (c.mode == ControlMode::hold) {
          f.interrupt = true;
        } else {
          control_ = c.mode;
          // Switching to open-loop control is one of the ways out of HOLD.
          if (c.mode == ControlMode::manual) f.resume = true;
        }
        break;
      case CommandKind::inflate: {
        const auto g = guard_inflation(c.pressure, p_max_safe_);
        if (g.clamped) {
          log_warning("inflation " + std::to_string(c.pressure) + " Pa clamped at p_max_safe " +
                      std::to_string(p_max_safe_) + " Pa");
        }
        state_.balloon_pressure = g.pressure;
        state_.balloon_inflated = g.pressure > 0.0;
        break;
      }
      case CommandKind::deflate:
        state_.balloon_pressure = 0.0;
        state_.balloon_inflated = false;
        break;
      case CommandKind::gripper: gripper_closed_ = c.gripper_closed; break;
      case CommandKind::drug_release: break;
    }
  }

  void set_phase(Phase p) {
    if (p == phase_) return;
    log({{"type", "phase"},
         {"from", std::string(phase_name(phase_))},
         {"to", std::string(phase_name(p))}});
    phase_ = p;
  }

  void finish(bool success, const std::string& reason) {
    finished_ = true;
    log({{"type", "end"},
         {"success", success},
         {"reason", reason},
         {"t", static_cast<double>(tick_) * kTickDt},
         {"insertion", state_.insertion_length}});
  }

  void log_warning(const std::string& what) { log({{"type", "warning"}, {"message", what}}); }

  void log_state(std::optional<double> theta_err, double fbg, bool advancing) {
    const Vec3 b = field_at_catheter(sc_.plant, state_.epm);
    nlohmann::json e{{"type", "state"},
                     {"t", state_.t},
                     {"phase", std::string(phase_name(phase_))},
                     {"mode", std::string(mode_name(control_))},
                     {"epm_p", vec_json(state_.epm.position)},
                     {"epm_m", vec_json(state_.epm.moment_direction)},
                     {"b", vec_json(b)},
                     {"b_mag", b.norm()},
                     {"tip_angle", state_.tip_angle},
                     {"theta_err", theta_err ? nlohmann::json(*theta_err) : nlohmann::json(nullptr)},
                     {"insertion", state_.insertion_length},
                     {"fbg", fbg},
                     {"theta_est", ctl_.theta_estimate},
                     {"advancing", advancing},
                     {"captured", state_.captured},
                     {"balloon_inflated", state_.balloon_inflated},
                     {"balloon_pressure", state_.balloon_pressure},
                     {"gripper_closed", gripper_closed_}};
    log(std::move(e));
    latest_state_ = last_logged_;
  }

  void log(nlohmann::json e) {
    e["tick"] = tick_;
    acc_.consume(e);
    last_logged_ = e;
    if (sink_) sink_(e);
    if (keep_events_) events_.push_back(std::move(e));
  }

  Scenario sc_;
  RunMode run_mode_;
  ControlMode control_;
  Phase phase_;
  DeflectionModel model_;
  std::mt19937_64 rng_;
  FbgMonitor fbg_;
  ScriptedOperator operator_;
  ControllerState ctl_;
  PlantState state_;
  double p_max_safe_ = 0.0;
  bool gripper_closed_ = false;
  long tick_ = 0;
  bool finished_ = false;
  bool header_written_ = false;
  bool keep_events_ = true;
  std::size_t event_cursor_ = 0;
  std::deque<UserCommand> queue_;
  std::string last_hold_reason_;
  MetricsAccumulator acc_;
  std::vector<nlohmann::json> events_;
  nlohmann::json last_logged_;
  std::optional<nlohmann::json> latest_state_;
  Sink sink_;
};

inline RunResult run_scenario(const Scenario& sc, RunMode mode) {
  Session s(sc, mode);
  return s.run();
}

}  // namespace mscr::sim
