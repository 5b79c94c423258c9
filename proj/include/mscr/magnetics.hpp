#pragma once
// Point-dipole model of the external permanent magnet (EPM), its closed-form
// inverse, the catheter torque/deflection relations and the magnetically
// feasible workspace for a field-magnitude task.

#include <mscr/common.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>

namespace mscr::magnetics {

struct DipoleSource {
  Vec3 position = Vec3::Zero();                   // m
  Vec3 moment_direction = Vec3::UnitZ();          // unit
  double moment_magnitude = 0.0;                  // A m^2

  Vec3 moment() const { return moment_magnitude * moment_direction; }

  void validate() const {
    require(position.allFinite(), "dipole position must be finite");
    require(moment_magnitude >= 0.0 && std::isfinite(moment_magnitude),
            "dipole moment magnitude must be >= 0");
    require(std::abs(moment_direction.norm() - 1.0) <= 1e-9,
            "dipole moment direction must be unit-norm");
  }
};

struct CatheterParams {
  double length = 0.080;              // L, m
  double radius = 0.725e-3;           // r, m
  double youngs_modulus = 6.0e6;      // E, Pa
  double remanence_magnitude = 0.05;  // |B_r|, T
  Vec3 remanence_direction = Vec3::UnitX();

  void validate() const {
    require(length > 0 && radius > 0 && youngs_modulus > 0 && remanence_magnitude > 0,
            "catheter parameters must be positive");
    require(length / radius > 10.0, "catheter must be slender (L/r > 10)");
    require(std::abs(remanence_direction.norm() - 1.0) <= 1e-9,
            "remanence direction must be unit-norm");
  }

  double second_moment() const { return kPi * std::pow(radius, 4) / 4.0; }
};

/// Field-magnitude band required at the target, in tesla.
struct FieldTask {
  double b_min = 0.016;
  double b_max = 0.025;

  // b_min == b_max is accepted as a degenerate task.
  void validate() const {
    require(b_min >= 0.0 && std::isfinite(b_max), "field task bounds must be finite and >= 0");
    require(b_min <= b_max, "field task requires b_min <= b_max");
  }
};

struct StandoffLimits {
  double min = 0.12;
  double max = 0.30;
};

/// Equivalent dipole moment of a uniformly magnetized cylinder, m = B_r V / mu0.
inline double cylinder_moment(double remanence, double diameter, double height) {
  require(remanence >= 0 && diameter > 0 && height > 0, "cylinder magnet parameters must be positive");
  const double volume = kPi * diameter * diameter / 4.0 * height;
  return remanence * volume / kMu0;
}

/// Moment of the N52 EPM used for all defaults: 1.45 T, 100 mm x 100 mm.
inline double default_epm_moment() { return cylinder_moment(1.45, 0.100, 0.100); }

namespace detail {
inline constexpr double kCoincidentTol = 1e-9;

inline Mat3 axial_operator(const Vec3& p_hat) {
  return 3.0 * p_hat * p_hat.transpose() - Mat3::Identity();
}

// (3 p p^T - I)^-1 = (3/2) p p^T - I for unit p.
inline Mat3 axial_operator_inverse(const Vec3& p_hat) {
  return 1.5 * p_hat * p_hat.transpose() - Mat3::Identity();
}
}  // namespace detail

inline Vec3 dipole_field(const DipoleSource& src, const Vec3& query_point) {
  const Vec3 p = query_point - src.position;
  const double d = p.norm();
  if (d < detail::kCoincidentTol) throw DomainError("dipole field queried at the source position");
  const Vec3 p_hat = p / d;
  const double scale = kMu0 * src.moment_magnitude / (4.0 * kPi * d * d * d);
  return scale * (detail::axial_operator(p_hat) * src.moment_direction);
}

/// Jacobian dB/d(query_point) of the dipole field.
inline Mat3 dipole_field_gradient(const DipoleSource& src, const Vec3& query_point) {
  const Vec3 p = query_point - src.position;
  const double d = p.norm();
  if (d < detail::kCoincidentTol) throw DomainError("dipole gradient queried at the source position");
  const Vec3 m = src.moment();
  const double k = kMu0 / (4.0 * kPi);
  const double d2 = d * d;
  const double d5 = d2 * d2 * d;
  const double mp = m.dot(p);
  // B = k (3 (m.p) p / d^5 - m / d^3)
  Mat3 g = 3.0 * (p * m.transpose() + m * p.transpose() + mp * Mat3::Identity()) / d5
           - 15.0 * mp * (p * p.transpose()) / (d5 * d2);
  return k * g;
}

struct InversePoseOptions {
  Vec3 target = Vec3::Zero();
  /// Unit vector from the target towards the EPM. Default places the magnet overhead.
  Vec3 heading = Vec3::UnitZ();
  std::optional<StandoffLimits> standoff;
};

/// EPM placement that produces b_desired at opts.target along the given heading.
inline DipoleSource inverse_pose(const Vec3& b_desired, double moment_magnitude,
                                 const InversePoseOptions& opts = {}) {
  const double b = b_desired.norm();
  require(b > 0.0 && std::isfinite(b), "desired field must be non-zero and finite");
  require(moment_magnitude > 0.0, "moment magnitude must be positive");
  require(opts.heading.norm() > 0.0, "heading must be non-zero");
  const Vec3 p_hat = opts.heading.normalized();
  const Vec3 b_hat = b_desired / b;

  const Vec3 unnormalized = detail::axial_operator_inverse(p_hat) * b_hat;
  const double gain = unnormalized.norm();  // |M^-1 b_hat| = 1 / |M m_hat|
  const Vec3 m_hat = unnormalized / gain;

  const double distance = std::cbrt(kMu0 * moment_magnitude / (4.0 * kPi * b * gain));
  if (opts.standoff) {
    if (distance < opts.standoff->min || distance > opts.standoff->max) {
      throw InfeasibleError("required EPM standoff " + std::to_string(distance) +
                            " m is outside [" + std::to_string(opts.standoff->min) + ", " +
                            std::to_string(opts.standoff->max) + "] m");
    }
  }
  DipoleSource src;
  src.position = opts.target + distance * p_hat;
  src.moment_direction = m_hat;
  src.moment_magnitude = moment_magnitude;
  return src;
}

/// Bending moment carried by the catheter at arc position x from the base.
inline double tip_torque(const CatheterParams& cat, double b_mag, double x) {
  if (!(x >= 0.0 && x <= cat.length)) throw DomainError("torque position outside [0, L]");
  return cat.remanence_magnitude * b_mag * cat.radius * cat.radius * (cat.length - x) / kMu0;
}

inline double max_deflection(const CatheterParams& cat, double b_mag) {
  require(b_mag >= 0.0, "field magnitude must be >= 0");
  return 4.0 * cat.remanence_magnitude * b_mag * std::pow(cat.length, 3) /
         (3.0 * cat.youngs_modulus * kMu0 * cat.radius * cat.radius * kPi);
}

/// Inverse of max_deflection: the field magnitude producing tip deflection delta.
inline double field_for_deflection(const CatheterParams& cat, double delta) {
  require(delta >= 0.0, "deflection must be >= 0");
  return delta * 3.0 * cat.youngs_modulus * kMu0 * cat.radius * cat.radius * kPi /
         (4.0 * cat.remanence_magnitude * std::pow(cat.length, 3));
}

enum class OrientationPolicy {
  free,   // any moment direction may be chosen at each position
  axial,  // moment held along the line joining magnet and target
};

struct GridSpec {
  int resolution = 32;  // cells per axis
};

struct WorkspaceReport {
  bool empty = true;
  double inner_radius = 0.0;  // m
  double outer_radius = 0.0;  // m
  double volume = 0.0;        // analytic shell volume, m^3
  double grid_volume = 0.0;   // cell-count estimate, m^3
  int grid_resolution = 0;
};

namespace detail {
// Range of |B| at distance d over admissible orientations is [lo, hi] * k / d^3.
inline std::pair<double, double> magnitude_factor_range(OrientationPolicy policy) {
  return policy == OrientationPolicy::free ? std::pair{1.0, 2.0} : std::pair{2.0, 2.0};
}

inline std::optional<std::pair<double, double>> shell_radii(double moment, const FieldTask& task,
                                                            OrientationPolicy policy) {
  const double k = kMu0 * moment / (4.0 * kPi);
  const auto [lo, hi] = magnitude_factor_range(policy);
  if (k <= 0.0 || task.b_max <= 0.0) return std::nullopt;
  const double inner = std::cbrt(lo * k / task.b_max);
  const double outer = task.b_min > 0.0 ? std::cbrt(hi * k / task.b_min)
                                        : std::numeric_limits<double>::infinity();
  if (!(outer >= inner)) return std::nullopt;
  return std::pair{inner, outer};
}
}  // namespace detail

/// Set of EPM positions (relative to the target) from which the task band is reachable.
inline WorkspaceReport feasible_workspace(double src_moment, const FieldTask& task,
                                          const GridSpec& grid = {},
                                          OrientationPolicy policy = OrientationPolicy::free) {
  task.validate();
  require(grid.resolution >= 8, "workspace grid needs at least 8 cells per axis");
  WorkspaceReport rep;
  rep.grid_resolution = grid.resolution;
  const auto radii = detail::shell_radii(src_moment, task, policy);
  if (!radii || !std::isfinite(radii->second)) {
    if (radii) {
      // b_min == 0: unbounded workspace
      rep.empty = false;
      rep.inner_radius = radii->first;
      rep.outer_radius = radii->second;
      rep.volume = rep.grid_volume = std::numeric_limits<double>::infinity();
    }
    return rep;
  }
  const auto [inner, outer] = *radii;
  rep.inner_radius = inner;
  rep.outer_radius = outer;
  rep.volume = 4.0 / 3.0 * kPi * (outer * outer * outer - inner * inner * inner);
  rep.empty = !(rep.volume > 0.0);

  const int n = grid.resolution;
  const double half = outer;
  const double h = 2.0 * half / n;
  long count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Vec3 c(-half + (i + 0.5) * h, -half + (j + 0.5) * h, -half + (l + 0.5) * h);
        const double r = c.norm();
        if (r >= inner && r <= outer && outer > inner) ++count;
      }
  rep.grid_volume = static_cast<double>(count) * h * h * h;
  return rep;
}

/// Monte-Carlo estimate of the workspace volume by uniform sampling of a bounding cube.
inline double monte_carlo_workspace_volume(double src_moment, const FieldTask& task,
                                           std::size_t samples, std::uint64_t seed,
                                           OrientationPolicy policy = OrientationPolicy::free) {
  task.validate();
  const auto radii = detail::shell_radii(src_moment, task, policy);
  if (!radii || !(radii->second > radii->first) || !std::isfinite(radii->second)) return 0.0;
  const double k = kMu0 * src_moment / (4.0 * kPi);
  const auto [lo, hi] = detail::magnitude_factor_range(policy);
  const double half = 1.05 * radii->second;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half, half);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const double d3 = std::pow(p.norm(), 3);
    if (d3 == 0.0) continue;
    const double b_lo = lo * k / d3;
    const double b_hi = hi * k / d3;
    if (b_lo <= task.b_max && b_hi >= task.b_min) ++hits;
  }
  const double cube = std::pow(2.0 * half, 3);
  return cube * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace mscr::magnetics
