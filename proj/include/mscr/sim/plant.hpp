#pragma once
// Quasi-static planar plant: the catheter's distal section bends by an angle
// set by the in-plane field component perpendicular to its base axis and
// relaxes toward that angle with a first-order lag. The advancing unit pushes
// the bent section along the tip heading.

#include <mscr/magnetics.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace mscr::sim {

inline constexpr double kTickRate = 27.0;
inline constexpr double kTickDt = 1.0 / kTickRate;

/// Maps the lateral field component to a steady tip angle. Uses the cantilever
/// relation theta = 3 delta / (2 L) on top of the deflection model unless a
/// calibration table (|B_perp| in T, angle in rad, both increasing) is given.
class DeflectionModel {
 public:
  DeflectionModel() = default;
  explicit DeflectionModel(magnetics::CatheterParams cat) : cat_(std::move(cat)) {}
  DeflectionModel(magnetics::CatheterParams cat, std::vector<std::pair<double, double>> table)
      : cat_(std::move(cat)), table_(std::move(table)) {
    require(table_.size() >= 2, "calibration table needs at least two rows");
    for (std::size_t i = 1; i < table_.size(); ++i) {
      require(table_[i].first > table_[i - 1].first && table_[i].second > table_[i - 1].second,
              "calibration table must be strictly increasing");
    }
    require(table_.front().first == 0.0 && table_.front().second == 0.0,
            "calibration table must start at (0, 0)");
  }

  const magnetics::CatheterParams& catheter() const { return cat_; }
  bool calibrated() const { return !table_.empty(); }

  /// Signed steady tip angle for a signed lateral field.
  double angle_for_field(double b_perp) const {
    const double b = std::abs(b_perp);
    double a = 0.0;
    if (table_.empty()) {
      a = 1.5 * magnetics::max_deflection(cat_, b) / cat_.length;
    } else {
      a = interpolate(b, false);
    }
    return std::copysign(a, b_perp);
  }

  double field_for_angle(double angle) const {
    const double a = std::abs(angle);
    double b = 0.0;
    if (table_.empty()) {
      b = magnetics::field_for_deflection(cat_, a * cat_.length / 1.5);
    } else {
      b = interpolate(a, true);
    }
    return std::copysign(b, angle);
  }

 private:
  double interpolate(double x, bool inverse) const {
    const auto key = [&](const auto& row) { return inverse ? row.second : row.first; };
    const auto val = [&](const auto& row) { return inverse ? row.first : row.second; };
    std::size_t i = 1;
    while (i + 1 < table_.size() && key(table_[i]) < x) ++i;
    const auto& lo = table_[i - 1];
    const auto& hi = table_[i];
    const double t = (x - key(lo)) / (key(hi) - key(lo));
    return val(lo) + t * (val(hi) - val(lo));
  }

  magnetics::CatheterParams cat_;
  std::vector<std::pair<double, double>> table_;
};

struct PlantConfig {
  magnetics::CatheterParams catheter;
  magnetics::FieldTask task;
  magnetics::StandoffLimits standoff;
  double moment = magnetics::default_epm_moment();
  double lag_tau = 0.1;             // s
  double free_length = 0.010;       // m, visible bending section
  double marker_spacing = 0.010;    // m, marker1 -> marker2 along the body
  double stiffness_factor = 1.0;    // true/nominal steady angle ratio
  double capture_radius = 1.5e-3;   // m
  double duct_lookahead = 0.010;    // m
  Vec3 field_point = Vec3::Zero();  // where the catheter's field is evaluated
  std::vector<std::pair<double, double>> calibration;

  DeflectionModel deflection() const {
    return calibration.empty() ? DeflectionModel(catheter) : DeflectionModel(catheter, calibration);
  }

  void validate() const {
    catheter.validate();
    task.validate();
    require(moment > 0.0, "plant: EPM moment must be > 0");
    require(lag_tau > 0.0, "plant: lag time constant must be > 0");
    require(free_length > 0.0 && marker_spacing > 0.0, "plant: lengths must be > 0");
    require(stiffness_factor > 0.0, "plant: stiffness factor must be > 0");
    require(capture_radius > 0.0 && duct_lookahead > 0.0, "plant: capture geometry must be > 0");
    require(standoff.min > 0.0 && standoff.min < standoff.max, "plant: standoff limits invalid");
  }
};

struct PlantState {
  magnetics::DipoleSource epm;
  double insertion_length = 0.0;  // m deployed by the advancing unit
  double tip_angle = 0.0;         // rad
  Vec2 base = Vec2::Zero();       // start of the bending section
  Vec2 papilla = Vec2(0.04, 0.0);
  Vec2 duct_direction = Vec2::UnitX();
  bool captured = false;
  bool balloon_inflated = false;
  double balloon_pressure = 0.0;  // Pa
  double t = 0.0;
  long tick = 0;
};

/// In-plane field at the catheter with a 2-D view for the steering plane.
inline Vec3 field_at_catheter(const PlantConfig& cfg, const magnetics::DipoleSource& epm) {
  return magnetics::dipole_field(epm, cfg.field_point);
}

/// Constant-curvature arc of the bending section, base heading +x.
inline Vec2 tip_position(const PlantConfig& cfg, const Vec2& base, double angle) {
  const double l = cfg.free_length;
  if (std::abs(angle) < 1e-8) {
    return base + Vec2(l * (1.0 - angle * angle / 6.0), l * angle / 2.0);
  }
  return base + Vec2(l * std::sin(angle) / angle, l * (1.0 - std::cos(angle)) / angle);
}

struct MarkerLayout {
  Vec2 marker1;
  Vec2 marker2;
  Vec2 target;  // papilla entry, or a look-ahead point on the duct once captured
};

inline MarkerLayout markers(const PlantConfig& cfg, const PlantState& s) {
  MarkerLayout m;
  m.marker2 = tip_position(cfg, s.base, s.tip_angle);
  m.marker1 = m.marker2 - cfg.marker_spacing * Vec2(std::cos(s.tip_angle), std::sin(s.tip_angle));
  if (!s.captured) {
    m.target = s.papilla;
  } else {
    const double along = std::max(0.0, (m.marker2 - s.papilla).dot(s.duct_direction));
    m.target = s.papilla + (along + cfg.duct_lookahead) * s.duct_direction;
  }
  return m;
}

/// True angular error seen by a perfect camera.
inline double true_angle_error(const PlantConfig& cfg, const PlantState& s) {
  const auto m = markers(cfg, s);
  const Vec2 body = m.marker2 - m.marker1;
  const Vec2 approach = m.target - m.marker2;
  return std::atan2(body.x() * approach.y() - body.y() * approach.x(), body.dot(approach));
}

struct PlantInput {
  std::optional<magnetics::DipoleSource> epm;  // new EPM pose, or keep the current one
  double advance_speed = 0.0;                  // m/s, negative retracts
};

/// Steady tip angle the plant settles to under the EPM pose.
inline double steady_angle(const PlantConfig& cfg, const DeflectionModel& model,
                           const magnetics::DipoleSource& epm) {
  const Vec3 b = field_at_catheter(cfg, epm);
  return cfg.stiffness_factor * model.angle_for_field(b.y());
}

/// One step of length dt with the field held over the step. The lag is
/// integrated exactly, so splitting a step into smaller ones under a constant
/// field gives the same state up to rounding.
inline PlantState step_plant(const PlantConfig& cfg, const DeflectionModel& model, PlantState s,
                             const PlantInput& in, double dt = kTickDt) {
  require(dt > 0.0, "plant step needs dt > 0");
  if (in.epm) {
    const double b = field_at_catheter(cfg, *in.epm).norm();
    if (b > cfg.task.b_max) {
      throw SafetyStop("commanded field " + std::to_string(b * 1e3) + " mT exceeds b_max " +
                       std::to_string(cfg.task.b_max * 1e3) + " mT");
    }
    s.epm = *in.epm;
  }
  const double target = s.epm.moment_magnitude > 0.0 ? steady_angle(cfg, model, s.epm) : 0.0;
  s.tip_angle = target + (s.tip_angle - target) * std::exp(-dt / cfg.lag_tau);

  if (in.advance_speed != 0.0) {
    const double ds = std::clamp(in.advance_speed * dt, -s.insertion_length,
                                 std::max(0.0, cfg.catheter.length - s.insertion_length));
    s.base += ds * Vec2(std::cos(s.tip_angle), std::sin(s.tip_angle));
    s.insertion_length += ds;
  }
  if (!s.captured) {
    const Vec2 tip = tip_position(cfg, s.base, s.tip_angle);
    if ((tip - s.papilla).norm() <= cfg.capture_radius) s.captured = true;
  }
  s.t += dt;
  ++s.tick;
  return s;
}

}  // namespace mscr::sim
