#pragma once
// Autonomous steering: angular error -> desired bend -> desired field ->
// incremental EPM pose update by damped least squares on the field Jacobian,
// with the closed-form magnet pose as a secondary objective in the null space.

#include <mscr/perception.hpp>
#include <mscr/sim/plant.hpp>

#include <Eigen/Geometry>

#include <optional>
#include <string>

namespace mscr::sim {

enum class ControlMode { autonomous, manual, hold };

inline std::string_view mode_name(ControlMode m) {
  switch (m) {
    case ControlMode::autonomous: return "autonomous";
    case ControlMode::manual: return "manual";
    case ControlMode::hold: return "hold";
  }
  return "unknown";
}

inline ControlMode mode_from_name(std::string_view s) {
  if (s == "autonomous") return ControlMode::autonomous;
  if (s == "manual") return ControlMode::manual;
  if (s == "hold") return ControlMode::hold;
  throw DomainError("unknown control mode '" + std::string(s) + "'");
}

struct ControllerConfig {
  ControlMode mode = ControlMode::autonomous;
  double step_gain = 0.5;             // fraction of the angular error requested per tick
  double dls_damping = 0.02;          // T/m
  double null_gain = 0.5;             // pull toward the closed-form pose
  double max_step_translation = 2e-3; // m per tick
  double max_step_rotation = 0.02;    // rad per tick
  double align_threshold = deg2rad(3.0);
  double advance_speed = 0.5e-3;      // m/s
  double fbg_tolerance = deg2rad(2.0);
  int fbg_frames = 3;
  double angle_deadband = 1e-6;      // rad; smaller errors are not corrected
  double pixels_per_meter = 1.0e4;    // camera scale used to read detections

  void validate() const {
    require(step_gain > 0.0 && step_gain <= 1.0, "controller: step_gain must lie in (0, 1]");
    require(dls_damping > 0.0, "controller: dls_damping must be > 0");
    require(null_gain >= 0.0 && null_gain <= 1.0, "controller: null_gain must lie in [0, 1]");
    require(max_step_translation > 0.0 && max_step_rotation > 0.0,
            "controller: max pose step must be > 0");
    require(align_threshold > 0.0, "controller: align_threshold must be > 0");
    require(advance_speed > 0.0, "controller: advance_speed must be > 0");
    require(fbg_tolerance > 0.0 && fbg_frames >= 1, "controller: FBG settings must be positive");
    require(pixels_per_meter > 0.0, "controller: pixels_per_meter must be > 0");
    require(angle_deadband >= 0.0 && angle_deadband < align_threshold,
            "controller: angle_deadband must lie in [0, align_threshold)");
  }
};

/// Incremental EPM motion: translation and a rotation vector applied to the moment direction.
struct PoseDelta {
  Vec3 translation = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();

  bool is_zero() const { return translation.isZero(0.0) && rotation.isZero(0.0); }
};

inline magnetics::DipoleSource apply(const magnetics::DipoleSource& src, const PoseDelta& d) {
  magnetics::DipoleSource out = src;
  out.position += d.translation;
  const double angle = d.rotation.norm();
  if (angle > 0.0) {
    out.moment_direction = (Eigen::AngleAxisd(angle, d.rotation / angle) * src.moment_direction).normalized();
  }
  return out;
}

/// Scales the delta uniformly so both parts respect the per-tick limits.
inline PoseDelta clamp_step(PoseDelta d, double max_translation, double max_rotation) {
  double s = 1.0;
  const double nt = d.translation.norm(), nr = d.rotation.norm();
  if (nt > max_translation) s = std::min(s, max_translation / nt);
  if (nr > max_rotation) s = std::min(s, max_rotation / nr);
  d.translation *= s;
  d.rotation *= s;
  return d;
}

/// 3x6 Jacobian of the field at the catheter with respect to (source
/// position, rotation vector of the moment). Rotation columns are scaled by
/// the current standoff so both blocks are in T/m.
inline Eigen::Matrix<double, 3, 6> field_jacobian(const PlantConfig& cfg, const magnetics::DipoleSource& epm,
                                                 double rotation_scale) {
  Eigen::Matrix<double, 3, 6> j;
  // B depends on (field_point - position): moving the source is the negative gradient.
  j.leftCols<3>() = -magnetics::dipole_field_gradient(epm, cfg.field_point);
  const Vec3 p = cfg.field_point - epm.position;
  const double d = p.norm();
  const Vec3 ph = p / d;
  const double k = kMu0 * epm.moment_magnitude / (4.0 * kPi * d * d * d);
  const Mat3 a = k * (3.0 * ph * ph.transpose() - Mat3::Identity());
  Mat3 skew;
  const Vec3& m = epm.moment_direction;
  skew << 0.0, -m.z(), m.y(), m.z(), 0.0, -m.x(), -m.y(), m.x(), 0.0;
  // d(m_hat) = dr x m_hat = -[m_hat]x dr
  j.rightCols<3>() = -a * skew / rotation_scale;
  return j;
}

struct AutoCommand {
  bool hold = false;         // no usable detection or infeasible field
  std::string reason;
  std::optional<double> theta_err;
  double theta_desired = 0.0;
  Vec3 field_desired = Vec3::Zero();
  PoseDelta delta;
};

struct ControllerState {
  double theta_estimate = 0.0;  // model prediction of the tip angle
};

/// Field request for a desired bend: the lateral part sets the bend, an axial
/// bias keeps the magnitude at b_min when the bend needs less.
inline Vec3 field_for_bend(const PlantConfig& cfg, const DeflectionModel& model, double theta) {
  double b_perp = model.field_for_angle(theta);
  const double cap = cfg.task.b_max * (1.0 - 1e-6);
  b_perp = std::clamp(b_perp, -cap, cap);
  const double bias = std::sqrt(std::max(0.0, cfg.task.b_min * cfg.task.b_min - b_perp * b_perp));
  return Vec3(bias, b_perp, 0.0);
}

/// Angular error from one frame of detections (pixel coordinates).
inline std::optional<double> measured_error(const std::vector<perception::BoundingBox>& boxes) {
  const auto best = perception::select_best(boxes);
  if (!best.complete()) return std::nullopt;
  try {
    return perception::angular_correction(perception::centroid(*best.get(perception::MarkerClass::marker1)),
                                          perception::centroid(*best.get(perception::MarkerClass::marker2)),
                                          perception::centroid(*best.get(perception::MarkerClass::papilla)))
        .theta;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

/// Damped least-squares step toward the desired field with the closed-form
/// pose as a null-space objective weighted by null_weight.
inline PoseDelta dls_step(const PlantConfig& cfg, const ControllerConfig& cc,
                          const magnetics::DipoleSource& epm, const Vec3& b_desired,
                          const magnetics::DipoleSource& goal, double null_weight = 1.0) {
  const double scale = (cfg.field_point - epm.position).norm();
  const auto j = field_jacobian(cfg, epm, scale);
  const Vec3 err = b_desired - field_at_catheter(cfg, epm);

  Eigen::Matrix<double, 6, 1> pose_err;
  pose_err.head<3>() = goal.position - epm.position;
  const Vec3 axis = epm.moment_direction.cross(goal.moment_direction);
  const double ang = std::atan2(axis.norm(), epm.moment_direction.dot(goal.moment_direction));
  pose_err.tail<3>() = axis.norm() > 0.0 ? Vec3(scale * ang * axis.normalized()) : Vec3::Zero();

  const Mat3 jjt = j * j.transpose() + cc.dls_damping * cc.dls_damping * Mat3::Identity();
  const Eigen::Matrix<double, 6, 3> jpinv = j.transpose() * jjt.inverse();
  const Eigen::Matrix<double, 6, 6> null_proj = Eigen::Matrix<double, 6, 6>::Identity() - jpinv * j;
  const Eigen::Matrix<double, 6, 1> dx = jpinv * err + null_weight * cc.null_gain * (null_proj * pose_err);

  PoseDelta d;
  d.translation = dx.head<3>();
  d.rotation = dx.tail<3>() / scale;
  return d;
}

/// Shrinks a step until the predicted field stays inside the band's upper
/// limit and the standoff window; returns a zero step if none fits.
inline PoseDelta enforce_envelope(const PlantConfig& cfg, const magnetics::DipoleSource& epm, PoseDelta d) {
  for (int i = 0; i < 30; ++i) {
    const auto next = apply(epm, d);
    const double dist = (next.position - cfg.field_point).norm();
    if (field_at_catheter(cfg, next).norm() <= cfg.task.b_max * (1.0 - 1e-9) &&
        dist >= cfg.standoff.min && dist <= cfg.standoff.max)
      return d;
    d.translation *= 0.5;
    d.rotation *= 0.5;
  }
  return {};
}

inline AutoCommand autonomous_step(const PlantConfig& cfg, const DeflectionModel& model,
                                   const ControllerConfig& cc, const ControllerState& cs,
                                   const magnetics::DipoleSource& epm,
                                   const std::vector<perception::BoundingBox>& detections) {
  AutoCommand cmd;
  cmd.theta_err = measured_error(detections);
  if (!cmd.theta_err) {
    cmd.hold = true;
    cmd.reason = "missing detection";
    return cmd;
  }
  cmd.theta_desired = cs.theta_estimate;
  if (std::abs(*cmd.theta_err) <= cc.angle_deadband) return cmd;
  cmd.theta_desired += cc.step_gain * *cmd.theta_err;
  cmd.field_desired = field_for_bend(cfg, model, cmd.theta_desired);
  magnetics::DipoleSource goal;
  try {
    magnetics::InversePoseOptions opts;
    opts.target = cfg.field_point;
    opts.heading = Vec3::UnitZ();
    opts.standoff = cfg.standoff;
    goal = magnetics::inverse_pose(cmd.field_desired, epm.moment_magnitude, opts);
  } catch (const InfeasibleError& e) {
    cmd.hold = true;
    cmd.reason = e.what();
    return cmd;
  }
  // The magnet only drifts toward the canonical pose while there is a correction to make.
  const double w = std::min(1.0, std::abs(*cmd.theta_err) / cc.align_threshold);
  PoseDelta d = dls_step(cfg, cc, epm, cmd.field_desired, goal, w);
  d = clamp_step(d, cc.max_step_translation, cc.max_step_rotation);
  cmd.delta = enforce_envelope(cfg, epm, d);
  return cmd;
}

/// Advances the controller's internal model of the tip angle after a pose is applied.
inline void update_estimate(const PlantConfig& cfg, const DeflectionModel& model, ControllerState& cs,
                            const magnetics::DipoleSource& epm, double dt = kTickDt) {
  const double target = model.angle_for_field(field_at_catheter(cfg, epm).y());
  cs.theta_estimate = target + (cs.theta_estimate - target) * std::exp(-dt / cfg.lag_tau);
}

/// Magnet pose producing the initial field request (b_min along the body axis).
inline magnetics::DipoleSource initial_epm(const PlantConfig& cfg) {
  magnetics::InversePoseOptions opts;
  opts.target = cfg.field_point;
  opts.heading = Vec3::UnitZ();
  opts.standoff = cfg.standoff;
  const double b = std::max(cfg.task.b_min, 1e-6);
  return magnetics::inverse_pose(Vec3(b, 0.0, 0.0), cfg.moment, opts);
}

}  // namespace mscr::sim
