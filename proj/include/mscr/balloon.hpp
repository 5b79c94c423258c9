#pragma once
// Thick-walled cylindrical anchoring balloon with a third-order Yeoh material,
// inflated under plane strain (lambda_z = 1) and incompressibility.
//
// Notation: lambda is the hoop stretch r/R at a material radius. The reduced
// energy is W(lambda) = sum_i C_i x^i with x = lambda^2 + lambda^-2 - 2.
// Pressure and axial force follow from integrating W' across the wall; both
// integrals have closed-form antiderivatives (pressure_potential and
// force_potential below).

#include <mscr/common.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

namespace mscr::balloon {

struct YeohConstants {
  double c1 = 0.0;  // Pa
  double c2 = 0.0;
  double c3 = 0.0;
};

/// Representative DragonSkin-30-class constants (Pa). Not fitted to any data set here.
inline constexpr YeohConstants kDefaultYeoh{1.0e5, 1.5e3, 10.0};

struct BurstStats {
  double mean = 0.0;  // Pa
  double sd = 0.0;    // Pa
};

struct BalloonSpec {
  double r_in = 0.5e-3;   // reference inner radius, m
  double r_out = 0.7e-3;  // reference outer radius, m
  double height = 6.0e-3; // L_b, m
  YeohConstants yeoh = kDefaultYeoh;
  std::optional<BurstStats> burst;

  void validate() const {
    require(r_in > 0.0 && r_in < r_out, "balloon requires 0 < R_in < R_out");
    require(height > 0.0, "balloon height must be positive");
    require(yeoh.c1 > 0.0, "Yeoh C1 must be positive");
    if (burst) require(burst->mean > 0.0 && burst->sd >= 0.0, "burst statistics must be positive");
  }

  double wall_thickness() const { return r_out - r_in; }
  double diameter_to_thickness() const { return 2.0 * r_out / wall_thickness(); }
  /// Thick-wall qualification rule as stated for this design: D/t > 10.
  bool thick_wall_rule() const { return diameter_to_thickness() > 10.0; }
};

// --- reduced energy -------------------------------------------------------

inline double invariant_excess(double lambda) {
  return lambda * lambda + 1.0 / (lambda * lambda) - 2.0;
}

inline double reduced_energy(const YeohConstants& c, double lambda) {
  const double x = invariant_excess(lambda);
  return x * (c.c1 + x * (c.c2 + x * c.c3));
}

/// dW/dlambda along the plane-strain path.
inline double reduced_energy_d1(const YeohConstants& c, double lambda) {
  const double x = invariant_excess(lambda);
  const double dx = 2.0 * lambda - 2.0 / (lambda * lambda * lambda);
  return (c.c1 + 2.0 * c.c2 * x + 3.0 * c.c3 * x * x) * dx;
}

inline double reduced_energy_d2(const YeohConstants& c, double lambda) {
  const double x = invariant_excess(lambda);
  const double l2 = lambda * lambda;
  const double dx = 2.0 * lambda - 2.0 / (l2 * lambda);
  const double ddx = 2.0 + 6.0 / (l2 * l2);
  return (2.0 * c.c2 + 6.0 * c.c3 * x) * dx * dx + (c.c1 + 2.0 * c.c2 * x + 3.0 * c.c3 * x * x) * ddx;
}

/// dW/dlambda_z at lambda_z = 1 (axial partial of the three-stretch energy).
inline double reduced_energy_dz(const YeohConstants& c, double lambda) {
  const double x = invariant_excess(lambda);
  return (c.c1 + 2.0 * c.c2 * x + 3.0 * c.c3 * x * x) * (2.0 - 2.0 / (lambda * lambda));
}

/// W'(lambda) / (lambda^2 - 1) with the removable pole cancelled analytically.
inline double pressure_integrand(const YeohConstants& c, double lambda) {
  const double x = invariant_excess(lambda);
  const double l3 = lambda * lambda * lambda;
  return (c.c1 + 2.0 * c.c2 * x + 3.0 * c.c3 * x * x) * 2.0 * (lambda * lambda + 1.0) / l3;
}

/// Antiderivative of pressure_integrand.
inline double pressure_potential(const YeohConstants& c, double lambda) {
  const double l2 = lambda * lambda;
  const double l4 = l2 * l2;
  const double l6 = l4 * l2;
  const double ln = std::log(lambda);
  return c.c1 * (2.0 * ln - 1.0 / l2) +
         c.c2 * (2.0 * l2 - 4.0 * ln + 2.0 / l2 - 1.0 / l4) +
         c.c3 * (1.5 * l4 - 9.0 * l2 + 12.0 * ln - 6.0 / l2 + 4.5 / l4 - 1.0 / l6);
}

/// Antiderivative of (2 W_z - lambda W') lambda / (lambda^2 - 1)^2.
/// The numerator simplifies to -2 sum_i i C_i x^i.
inline double force_potential(const YeohConstants& c, double lambda) {
  const double l2 = lambda * lambda;
  const double l4 = l2 * l2;
  const double ln = std::log(lambda);
  return c.c1 * (-2.0 * ln) +
         c.c2 * (-2.0 * l2 + 8.0 * ln + 2.0 / l2) +
         c.c3 * (-1.5 * l4 + 12.0 * l2 - 36.0 * ln - 12.0 / l2 + 1.5 / l4);
}

// --- kinematics and loads -------------------------------------------------

inline double lambda_ex_of(const BalloonSpec& spec, double lambda_in) {
  require(lambda_in >= 1.0, "inner stretch must be >= 1");
  const double r_in_def = lambda_in * spec.r_in;
  const double r_out_def =
      std::sqrt(spec.r_out * spec.r_out - spec.r_in * spec.r_in + r_in_def * r_in_def);
  return r_out_def / spec.r_out;
}

/// Pressure difference p_in - p_ex sustaining inner stretch lambda_in.
inline double delta_p(const BalloonSpec& spec, double lambda_in) {
  require(lambda_in >= 1.0, "inner stretch must be >= 1");
  if (lambda_in == 1.0) return 0.0;
  const double lambda_ex = lambda_ex_of(spec, lambda_in);
  return pressure_potential(spec.yeoh, lambda_in) - pressure_potential(spec.yeoh, lambda_ex);
}

/// Slope d(delta_p)/d(lambda_in).
inline double delta_p_slope(const BalloonSpec& spec, double lambda_in) {
  require(lambda_in >= 1.0, "inner stretch must be >= 1");
  const double lambda_ex = lambda_ex_of(spec, lambda_in);
  const double dex = lambda_in * spec.r_in * spec.r_in / (spec.r_out * spec.r_out * lambda_ex);
  return pressure_integrand(spec.yeoh, lambda_in) - pressure_integrand(spec.yeoh, lambda_ex) * dex;
}

/// External axial force on the closed ends at inner stretch lambda_in with
/// external pressure p_ex. The internal pressure is fixed by equilibrium,
/// p_in = p_ex + delta_p(lambda_in).
inline double axial_force(const BalloonSpec& spec, double lambda_in, double p_ex) {
  require(lambda_in >= 1.0, "inner stretch must be >= 1");
  const double lambda_ex = lambda_ex_of(spec, lambda_in);
  const double r_out_def = lambda_ex * spec.r_out;
  double wall = 0.0;
  if (lambda_in > 1.0) {
    wall = kPi * spec.r_in * spec.r_in * (lambda_in * lambda_in - 1.0) *
           (force_potential(spec.yeoh, lambda_in) - force_potential(spec.yeoh, lambda_ex));
  }
  return wall - p_ex * kPi * r_out_def * r_out_def;
}

/// Overload taking the measured internal pressure; rejects states that are
/// not in equilibrium (relative mismatch above rel_tol of the larger pressure).
inline double axial_force(const BalloonSpec& spec, double lambda_in, double p_in, double p_ex,
                          double rel_tol = 1e-6) {
  const double expected = p_ex + delta_p(spec, lambda_in);
  const double scale = std::max({std::abs(p_in), std::abs(expected), 1.0});
  if (std::abs(p_in - expected) > rel_tol * scale) {
    throw DomainError("internal pressure " + std::to_string(p_in) +
                      " Pa is not in equilibrium with lambda_in (expected " +
                      std::to_string(expected) + " Pa)");
  }
  return axial_force(spec, lambda_in, p_ex);
}

struct InflationState {
  double lambda_in = 1.0;
  double lambda_ex = 1.0;
  double delta_p = 0.0;  // Pa
  double f_ex = 0.0;     // N
};

inline InflationState inflate(const BalloonSpec& spec, double lambda_in, double p_ex = 0.0) {
  InflationState s;
  s.lambda_in = lambda_in;
  s.lambda_ex = lambda_ex_of(spec, lambda_in);
  s.delta_p = delta_p(spec, lambda_in);
  s.f_ex = axial_force(spec, lambda_in, p_ex);
  return s;
}

/// Radial pressure exerted on surrounding tissue when the outer wall is in
/// contact: whatever part of p_in the wall does not carry.
inline double contact_pressure(const BalloonSpec& spec, double p_in, double lambda_in) {
  return p_in - delta_p(spec, lambda_in);
}

// --- quadrature cross-checks ---------------------------------------------
// Reports print these next to the closed forms so a reader can see the two
// agree without running the test suite.

/// delta_p by adaptive Gauss-Kronrod on the pressure integrand.
inline double delta_p_quadrature(const BalloonSpec& spec, double lambda_in) {
  require(lambda_in >= 1.0, "inner stretch must be >= 1");
  if (lambda_in == 1.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate([&](double l) { return pressure_integrand(spec.yeoh, l); },
                                              lambda_ex_of(spec, lambda_in), lambda_in, 15, 1e-14);
}

/// Axial end force with the wall term integrated numerically.
inline double axial_force_quadrature(const BalloonSpec& spec, double lambda_in, double p_ex) {
  require(lambda_in >= 1.0, "inner stretch must be >= 1");
  const double lambda_ex = lambda_ex_of(spec, lambda_in);
  const double r_out_def = lambda_ex * spec.r_out;
  double wall = 0.0;
  if (lambda_in > 1.0) {
    const auto& c = spec.yeoh;
    // (2 W_z - lambda W') lambda / (lambda^2 - 1)^2 reduces to -2/lambda * dW/dI1.
    const auto g = [&](double l) {
      const double x = invariant_excess(l);
      return -2.0 / l * (c.c1 + 2.0 * c.c2 * x + 3.0 * c.c3 * x * x);
    };
    using boost::math::quadrature::gauss_kronrod;
    wall = kPi * spec.r_in * spec.r_in * (lambda_in * lambda_in - 1.0) *
           gauss_kronrod<double, 61>::integrate(g, lambda_ex, lambda_in, 15, 1e-14);
  }
  return wall - p_ex * kPi * r_out_def * r_out_def;
}

// --- stability ------------------------------------------------------------

struct StabilityReport {
  bool prismatic_ok = false;
  bool axisymmetric_ok = false;
  bool asymmetric_ok = false;
  double prismatic_margin = 0.0;     // integral of W'' lambda across the wall (diagnostic)
  double axisymmetric_margin = 0.0;  // lambda_z - n pi R_out / (lambda_z^1.5 L)
  double asymmetric_margin = 0.0;    // d(delta_p)/d(lambda_in)
  int critical_mode = 0;             // smallest n whose axisymmetric margin is <= 0
};

inline double axisymmetric_margin(const BalloonSpec& spec, double lambda_z, int mode_n) {
  return lambda_z - mode_n * kPi * spec.r_out / (std::pow(lambda_z, 1.5) * spec.height);
}

/// Screens an inflation state against the three bifurcation modes.
///
/// Prismatic and asymmetric screening is membership of the deformed radii in
/// the admissible set: the radii satisfy the incompressible kinematics with
/// r_in >= R_in, and the state lies on the rising branch of the pressure
/// curve. The prismatic wall integral is reported only as a diagnostic.
inline StabilityReport stability_screen(const BalloonSpec& spec, double lambda_z, int mode_n,
                                        double lambda_in = 1.0) {
  spec.validate();
  if (lambda_z != 1.0) throw DomainError("stability screen supports lambda_z = 1 only");
  require(mode_n >= 1, "mode number must be >= 1");
  require(lambda_in >= 1.0, "inner stretch must be >= 1");

  StabilityReport rep;
  rep.axisymmetric_margin = axisymmetric_margin(spec, lambda_z, mode_n);
  rep.axisymmetric_ok = rep.axisymmetric_margin > 0.0;
  rep.critical_mode = static_cast<int>(
      std::ceil(std::pow(lambda_z, 2.5) * spec.height / (kPi * spec.r_out) - 1e-12));
  rep.critical_mode = std::max(rep.critical_mode, 1);

  const double lambda_ex = lambda_ex_of(spec, lambda_in);
  const auto primitive = [&](double l) {
    return l * reduced_energy_d1(spec.yeoh, l) - reduced_energy(spec.yeoh, l);
  };
  rep.prismatic_margin = primitive(lambda_in) - primitive(lambda_ex);

  const double r_in_def = lambda_in * spec.r_in;
  const double r_out_def = lambda_ex * spec.r_out;
  const double kinematic_residual =
      r_out_def * r_out_def - (std::sqrt(lambda_z) * (spec.r_out * spec.r_out - spec.r_in * spec.r_in) +
                               r_in_def * r_in_def);
  const bool admissible_radii = r_in_def >= spec.r_in && r_out_def > r_in_def &&
                                std::abs(kinematic_residual) <= 1e-12 * r_out_def * r_out_def;
  rep.asymmetric_margin = delta_p_slope(spec, lambda_in);
  const bool rising = rep.asymmetric_margin > 0.0;
  rep.prismatic_ok = admissible_radii && rising;
  rep.asymmetric_ok = admissible_radii && rising;
  return rep;
}

// --- interconnected balloons ----------------------------------------------

/// Normalized pressure of one balloon of the interconnected pair,
/// (1/l - 1/l^2)(1 + l^2 / K).
inline double pair_pressure(double lambda, double k) {
  return (1.0 / lambda - 1.0 / (lambda * lambda)) * (1.0 + lambda * lambda / k);
}

inline double pair_pressure_slope(double lambda, double k) {
  return (2.0 - lambda) / (lambda * lambda * lambda) + 1.0 / k;
}

/// Equal-pressure residual g(a, b); zero on every equilibrium, antisymmetric under a <-> b.
inline double pair_residual(double lambda_a, double lambda_b, double k) {
  return pair_pressure(lambda_a, k) - pair_pressure(lambda_b, k);
}

namespace detail {
// Bisection down to adjacent doubles; f(lo) and f(hi) must differ in sign.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_lo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

struct PairOptions {
  double lambda_max = 10.0;
  int coarse_samples = 10000;
  int branch_samples = 200;
};

struct PairBranchPoint {
  double lambda_a = 1.0;
  double lambda_b = 1.0;
  double residual = 0.0;
};

struct PairEquilibria {
  bool has_bifurcation = false;
  double lambda_star = std::numeric_limits<double>::quiet_NaN();    // pressure maximum
  double p_cr = std::numeric_limits<double>::quiet_NaN();           // normalized pressure at lambda_star
  double lambda_valley = std::numeric_limits<double>::quiet_NaN();  // pressure minimum
  std::vector<PairBranchPoint> symmetric;
  std::vector<PairBranchPoint> asymmetric;
};

/// Stationary points of pair_pressure. A maximum exists only for K > 27.
inline std::optional<std::pair<double, double>> pair_extrema(double k, double lambda_max) {
  require(k > 0.0, "material constant K must be positive");
  // slope = (2 - l)/l^3 + 1/K; (l - 2)/l^3 peaks at l = 3 with value 1/27.
  const auto slope = [k](double l) { return pair_pressure_slope(l, k); };
  if (!(slope(3.0) < 0.0) || lambda_max <= 3.0) return std::nullopt;
  const double peak = detail::bisect(slope, 2.0, 3.0, slope(2.0));
  double hi = 3.0;
  while (slope(hi) < 0.0) hi *= 2.0;
  const double valley = detail::bisect(slope, 3.0, hi, slope(3.0));
  if (peak > lambda_max) return std::nullopt;
  return std::pair{peak, valley};
}

/// Partners lambda_b != lambda_a sharing the pressure of lambda_a, found by a
/// coarse scan over [1, lambda_max] and bisection on each sign change.
inline std::vector<double> pair_partners(double lambda_a, double k, const PairOptions& opts = {}) {
  require(lambda_a >= 1.0, "stretch must be >= 1");
  std::vector<double> out;
  const int n = opts.coarse_samples;
  const double step = (opts.lambda_max - 1.0) / n;
  const auto g = [&](double b) { return pair_residual(lambda_a, b, k); };
  double x0 = 1.0;
  double g0 = g(x0);
  for (int i = 1; i <= n; ++i) {
    const double x1 = 1.0 + i * step;
    const double g1 = g(x1);
    const bool straddles_self = x0 <= lambda_a && lambda_a <= x1;
    if (!straddles_self && ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0))) {
      out.push_back(detail::bisect(g, x0, x1, g0));
    } else if (!straddles_self && g1 == 0.0 && i < n) {
      out.push_back(x1);
    }
    x0 = x1;
    g0 = g1;
  }
  return out;
}

inline PairEquilibria two_balloon_equilibria(double k, const PairOptions& opts = {}) {
  require(k > 0.0, "material constant K must be positive");
  require(opts.lambda_max > 1.0 && opts.branch_samples >= 2 && opts.coarse_samples >= 10,
          "invalid search window");
  PairEquilibria res;
  const double h = (opts.lambda_max - 1.0) / (opts.branch_samples - 1);
  for (int i = 0; i < opts.branch_samples; ++i) {
    const double l = 1.0 + i * h;
    res.symmetric.push_back({l, l, pair_residual(l, l, k)});
  }
  const auto ext = pair_extrema(k, opts.lambda_max);
  if (!ext) return res;
  res.has_bifurcation = true;
  res.lambda_star = ext->first;
  res.lambda_valley = ext->second;
  res.p_cr = pair_pressure(res.lambda_star, k);
  for (int i = 0; i < opts.branch_samples; ++i) {
    const double la = 1.0 + i * h;
    for (double lb : pair_partners(la, k, opts)) {
      res.asymmetric.push_back({la, lb, pair_residual(la, lb, k)});
    }
  }
  return res;
}

// --- safe actuation range -------------------------------------------------

struct SafeRange {
  double p_max_safe = 0.0;        // Pa
  double lambda_at_p_max = 1.0;   // inner stretch reaching p_max_safe on the rising branch
  bool has_limit_point = false;
  double limit_pressure = 0.0;    // model cap: limit point, or delta_p at the window edge
  double limit_lambda = 1.0;
  std::optional<double> burst_cap;  // mean - 3 sd
};

namespace detail {
template <typename F>
double golden_max(F&& f, double a, double b, double tol = 1e-12) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol * std::max(1.0, std::abs(a))) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}
}  // namespace detail

/// First interior pressure maximum of delta_p over (1, lambda_max], if any.
inline std::optional<double> limit_point(const BalloonSpec& spec, double lambda_max,
                                         int samples = 4000) {
  const double step = (lambda_max - 1.0) / samples;
  double prev = 0.0;
  double cur = delta_p(spec, 1.0 + step);
  for (int i = 1; i < samples; ++i) {
    const double next = delta_p(spec, 1.0 + (i + 1) * step);
    if (cur >= prev && cur > next) {
      const double lo = 1.0 + (i - 1) * step;
      const double hi = 1.0 + (i + 1) * step;
      return detail::golden_max([&](double l) { return delta_p(spec, l); }, lo, hi);
    }
    prev = cur;
    cur = next;
  }
  return std::nullopt;
}

/// Largest inflation pressure considered safe: the smaller of the model's
/// pressure cap and the burst cap (mean - 3 sd), divided by safety_factor.
inline SafeRange safe_range(const BalloonSpec& spec, double safety_factor,
                            double lambda_window_max = 5.0, bool use_model = true) {
  spec.validate();
  require(safety_factor >= 1.0, "safety factor must be >= 1");
  SafeRange out;
  std::optional<double> cap;
  if (use_model && lambda_window_max > 1.0) {
    if (auto lp = limit_point(spec, lambda_window_max)) {
      out.has_limit_point = true;
      out.limit_lambda = *lp;
    } else {
      out.limit_lambda = lambda_window_max;
    }
    out.limit_pressure = delta_p(spec, out.limit_lambda);
    cap = out.limit_pressure;
  }
  if (spec.burst) {
    out.burst_cap = spec.burst->mean - 3.0 * spec.burst->sd;
    cap = cap ? std::min(*cap, *out.burst_cap) : *out.burst_cap;
  }
  if (!cap) throw MissingDataError("safe range needs burst statistics or a model pressure cap");
  out.p_max_safe = *cap / safety_factor;

  const double hi_lambda = use_model && lambda_window_max > 1.0 ? out.limit_lambda : lambda_window_max;
  if (hi_lambda > 1.0 && out.p_max_safe > 0.0) {
    const auto f = [&](double l) { return delta_p(spec, l) - out.p_max_safe; };
    if (f(hi_lambda) <= 0.0) {
      out.lambda_at_p_max = hi_lambda;
    } else {
      out.lambda_at_p_max = detail::bisect(f, 1.0, hi_lambda, f(1.0));
    }
  }
  return out;
}

/// Inner stretch on the rising branch where delta_p equals the given pressure.
inline std::optional<double> stretch_for_pressure(const BalloonSpec& spec, double pressure,
                                                  double lambda_max = 5.0) {
  if (pressure <= 0.0) return 1.0;
  const double hi = limit_point(spec, lambda_max).value_or(lambda_max);
  const auto f = [&](double l) { return delta_p(spec, l) - pressure; };
  if (f(hi) < 0.0) return std::nullopt;
  return detail::bisect(f, 1.0, hi, f(1.0));
}

struct PressureSample {
  double pressure = 0.0;  // Pa
  double radius = 0.0;    // outer radius, m
};

struct RmseReport {
  double rmse_below = 0.0;  // m, samples with pressure < split
  double rmse_above = 0.0;  // m, samples with pressure >= split
  int n_below = 0;
  int n_above = 0;
  int n_unreachable = 0;  // samples above the model's pressure cap
};

/// Model-vs-measurement outer-radius error, split at split_pressure.
inline RmseReport fit_rmse(const BalloonSpec& spec, const std::vector<PressureSample>& data,
                           double split_pressure = 10.0e3, double lambda_max = 5.0) {
  RmseReport rep;
  double sum_below = 0.0, sum_above = 0.0;
  for (const auto& s : data) {
    const auto l = stretch_for_pressure(spec, s.pressure, lambda_max);
    if (!l) {
      ++rep.n_unreachable;
      continue;
    }
    const double model_radius = lambda_ex_of(spec, *l) * spec.r_out;
    const double e2 = (model_radius - s.radius) * (model_radius - s.radius);
    if (s.pressure < split_pressure) {
      sum_below += e2;
      ++rep.n_below;
    } else {
      sum_above += e2;
      ++rep.n_above;
    }
  }
  if (rep.n_below) rep.rmse_below = std::sqrt(sum_below / rep.n_below);
  if (rep.n_above) rep.rmse_above = std::sqrt(sum_above / rep.n_above);
  return rep;
}

}  // namespace mscr::balloon
