#pragma once
// Planar compliant-flexure model for the gripper blades. Curvature is expanded
// in shifted Legendre polynomials on [0, L] with three generalized
// coordinates; equilibrium under an end load minimizes total potential energy.

#include <mscr/common.hpp>
#include <mscr/magnetics.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mscr::gripper {

struct GripperSpec {
  double beam_length = 4.0e-3;   // L_g, m
  double width = 1.0e-3;         // m
  double thickness = 0.1e-3;     // m, in-plane bending direction
  double youngs_modulus = 2.0e9; // Pa
  double density = 1200.0;       // kg/m^3
  double twist_angle = 0.0;      // rad, total pre-twist

  void validate() const {
    require(beam_length > 0 && width > 0 && thickness > 0 && youngs_modulus > 0 && density > 0,
            "gripper spec: dimensions and material must be positive");
    require(std::isfinite(twist_angle), "gripper spec: twist angle must be finite");
  }

  double area() const { return width * thickness; }
  /// Bending about the thin axis; this is the compliant in-plane direction.
  double i_xx() const { return width * thickness * thickness * thickness / 12.0; }
  double i_yy() const { return thickness * width * width * width / 12.0; }
  double bending_stiffness() const { return youngs_modulus * i_xx(); }
};

struct CurvatureCoeffs {
  std::array<double, 3> alpha{0.0, 0.0, 0.0};

  double operator[](int k) const { return alpha[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return alpha[static_cast<std::size_t>(k)]; }
};

struct EndLoad {
  double f_x = 0.0;     // N
  double f_y = 0.0;     // N
  double moment = 0.0;  // N m
};

struct TipPose {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

namespace detail {

inline void check_s(double s, double length) {
  if (!(s >= 0.0 && s <= length)) throw DomainError("arc length outside [0, L_g]");
}

// Partial derivatives of phi(s) with respect to alpha_k, as functions of u = s/L.
inline std::array<double, 3> phi_basis(double u) {
  return {u, u * u - u, 2.0 * u * u * u - 3.0 * u * u + u};
}

inline double phi_at(const CurvatureCoeffs& a, double u) {
  const auto q = phi_basis(u);
  return a[0] * q[0] + a[1] * q[1] + a[2] * q[2];
}

// Gauss-Legendre nodes and weights on [0, 1], computed by Newton on P_n.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule make_gauss_rule(int n) {
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    r.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss_rule(int n) {
  static const GaussRule r20 = make_gauss_rule(20);
  static const GaussRule r24 = make_gauss_rule(24);
  static const GaussRule r40 = make_gauss_rule(40);
  if (n == 20) return r20;
  if (n == 24) return r24;
  if (n == 40) return r40;
  thread_local GaussRule other;
  other = make_gauss_rule(n);
  return other;
}

}  // namespace detail

/// phi'(s) for the three-term shifted Legendre expansion.
inline double curvature(double s, const CurvatureCoeffs& a, double length) {
  detail::check_s(s, length);
  const double u = s / length;
  return (a[0] + a[1] * (2.0 * u - 1.0) + a[2] * (6.0 * u * u - 6.0 * u + 1.0)) / length;
}

/// Tangent angle phi(s) with phi(0) = 0.
inline double tangent_angle(double s, const CurvatureCoeffs& a, double length) {
  detail::check_s(s, length);
  return detail::phi_at(a, s / length);
}

/// Tip position and angle for a blade clamped at the origin with its base
/// tangent at base_angle.
inline TipPose tip_pose(const CurvatureCoeffs& a, double length, int order = 24,
                        double base_angle = 0.0) {
  require(order >= 20, "tip_pose quadrature order must be >= 20");
  const auto& rule = detail::gauss_rule(order);
  TipPose t;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double phi = base_angle + detail::phi_at(a, rule.nodes[i]);
    t.x += rule.weights[i] * std::cos(phi);
    t.y += rule.weights[i] * std::sin(phi);
  }
  t.x *= length;
  t.y *= length;
  t.phi = base_angle + a[0];
  return t;
}

/// Bending energy (EI/2) int phi'^2 ds, exact by Legendre orthogonality.
inline double bending_energy(const GripperSpec& spec, const CurvatureCoeffs& a) {
  return 0.5 * spec.bending_stiffness() / spec.beam_length *
         (a[0] * a[0] + a[1] * a[1] / 3.0 + a[2] * a[2] / 5.0);
}

inline double potential_energy(const GripperSpec& spec, const EndLoad& load,
                               const CurvatureCoeffs& a) {
  const TipPose tip = tip_pose(a, spec.beam_length);
  return bending_energy(spec, a) - load.f_x * (tip.x - spec.beam_length) - load.f_y * tip.y -
         load.moment * tip.phi;
}

struct EnergyDerivatives {
  Eigen::Vector3d gradient;
  Eigen::Matrix3d hessian;
};

inline EnergyDerivatives energy_derivatives(const GripperSpec& spec, const EndLoad& load,
                                            const CurvatureCoeffs& a) {
  const double len = spec.beam_length;
  const double k = spec.bending_stiffness() / len;
  const auto& rule = detail::gauss_rule(24);
  Eigen::Vector3d dx = Eigen::Vector3d::Zero(), dy = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hx = Eigen::Matrix3d::Zero(), hy = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto qa = detail::phi_basis(rule.nodes[i]);
    const Eigen::Vector3d q(qa[0], qa[1], qa[2]);
    const double phi = detail::phi_at(a, rule.nodes[i]);
    const double w = rule.weights[i] * len;
    const double c = std::cos(phi), s = std::sin(phi);
    dx -= w * s * q;
    dy += w * c * q;
    hx -= w * c * q * q.transpose();
    hy -= w * s * q * q.transpose();
  }
  EnergyDerivatives d;
  const Eigen::Vector3d stiff(1.0, 1.0 / 3.0, 1.0 / 5.0);
  d.gradient = k * stiff.cwiseProduct(Eigen::Vector3d(a[0], a[1], a[2])) - load.f_x * dx -
               load.f_y * dy - load.moment * Eigen::Vector3d::UnitX();
  d.hessian = k * stiff.asDiagonal().toDenseMatrix() - load.f_x * hx - load.f_y * hy;
  return d;
}

struct SolveOptions {
  double max_tip_angle = kPi / 2.0;
  int max_iterations = 100;
  double tolerance = 1e-12;  // on the gradient, relative to EI / L
};

/// Diagnostics attached to a failed solve.
class SolveFailure : public ConvergenceError {
 public:
  SolveFailure(const std::string& what, CurvatureCoeffs last, double residual, int iterations)
      : ConvergenceError(what), last_iterate(last), gradient_norm(residual), iterations(iterations) {}
  CurvatureCoeffs last_iterate;
  double gradient_norm;
  int iterations;
};

/// Equilibrium coefficients under an end load by damped Newton on Pi(alpha).
inline CurvatureCoeffs solve_end_load(const GripperSpec& spec, const EndLoad& load,
                                      const SolveOptions& opts = {},
                                      std::optional<CurvatureCoeffs> guess = std::nullopt) {
  spec.validate();
  require(std::isfinite(load.f_x) && std::isfinite(load.f_y) && std::isfinite(load.moment),
          "end load must be finite");
  const double scale = spec.bending_stiffness() / spec.beam_length;
  CurvatureCoeffs a = guess.value_or(CurvatureCoeffs{});
  double gnorm = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const auto d = energy_derivatives(spec, load, a);
    gnorm = d.gradient.norm() / scale;
    if (gnorm < opts.tolerance) {
      if (std::abs(a[0]) > opts.max_tip_angle) {
        throw DomainError("end load exceeds the elastic tip-angle cap (" +
                          std::to_string(std::abs(a[0])) + " rad)");
      }
      return a;
    }
    // Shift the Hessian until it is positive definite so the step is a descent direction.
    Eigen::Matrix3d h = d.hessian;
    double shift = 0.0;
    Eigen::LLT<Eigen::Matrix3d> llt(h);
    while (llt.info() != Eigen::Success) {
      shift = shift == 0.0 ? 1e-6 * scale : 10.0 * shift;
      llt.compute(h + shift * Eigen::Matrix3d::Identity());
    }
    const Eigen::Vector3d step = -llt.solve(d.gradient);
    CurvatureCoeffs next = a;
    for (int k = 0; k < 3; ++k) next[k] = a[k] + step(k);
    // Near the minimum the energy difference is below rounding; a falling
    // gradient norm is the reliable acceptance signal there.
    if (energy_derivatives(spec, load, next).gradient.norm() >= d.gradient.norm()) {
      const double pi0 = potential_energy(spec, load, a);
      double t = 1.0;
      for (int ls = 0; ls < 40; ++ls) {
        t *= 0.5;
        for (int k = 0; k < 3; ++k) next[k] = a[k] + t * step(k);
        if (potential_energy(spec, load, next) <= pi0 + 1e-4 * t * d.gradient.dot(step)) break;
      }
    }
    a = next;
  }
  throw SolveFailure("end-load solve did not converge", a, gnorm, opts.max_iterations);
}

// ---------------------------------------------------------------------------
// Actuation curve

/// Tendon-driven jaw: the shuttle pushes each blade tip sideways by the
/// shuttle displacement; a rigid jaw arm of arm_length rides on the blade tip.
struct JawGeometry {
  double shuttle_travel = 0.4e-3;  // m
  int steps = 20;
  int jaw_count = 2;
  double open_gap = 2.0e-3;    // m, jaw gap at zero displacement
  double arm_length = 1.5e-3;  // m

  void validate() const {
    require(shuttle_travel > 0.0, "jaw geometry: shuttle travel must be > 0");
    require(steps >= 1, "jaw geometry: need at least one step");
    require(jaw_count >= 1, "jaw geometry: jaw count must be >= 1");
    require(open_gap > 0.0 && arm_length >= 0.0, "jaw geometry: gap and arm must be positive");
  }
};

struct ActuationPoint {
  double displacement = 0.0;  // m
  double tendon_force = 0.0;  // N
  double jaw_gap = 0.0;       // m
  CurvatureCoeffs alpha;
};

/// Transverse tip force that produces tip deflection y_target, found by
/// secant iteration on the nonlinear solve.
inline double force_for_tip_deflection(const GripperSpec& spec, double y_target,
                                       const SolveOptions& opts = {},
                                       CurvatureCoeffs* alpha_out = nullptr) {
  const double ei = spec.bending_stiffness();
  const double len = spec.beam_length;
  if (y_target == 0.0) {
    if (alpha_out) *alpha_out = CurvatureCoeffs{};
    return 0.0;
  }
  const auto tip_y = [&](double f, CurvatureCoeffs& a) {
    a = solve_end_load(spec, {0.0, f, 0.0}, opts, a);
    return tip_pose(a, len).y;
  };
  CurvatureCoeffs a{};
  double f0 = 0.0, y0 = 0.0;
  double f1 = 3.0 * ei * y_target / (len * len * len);
  double y1 = tip_y(f1, a);
  for (int it = 0; it < 60; ++it) {
    if (std::abs(y1 - y_target) <= 1e-13 * len || y1 == y0) break;
    const double f2 = f1 + (y_target - y1) * (f1 - f0) / (y1 - y0);
    f0 = f1;
    y0 = y1;
    f1 = f2;
    y1 = tip_y(f1, a);
  }
  if (std::abs(y1 - y_target) > 1e-10 * len) {
    throw SolveFailure("tip deflection target not reached", a, std::abs(y1 - y_target) / len, 60);
  }
  if (alpha_out) *alpha_out = a;
  return f1;
}

inline std::vector<ActuationPoint> actuation_curve(const GripperSpec& spec, const JawGeometry& jaw,
                                                   const SolveOptions& opts = {}) {
  spec.validate();
  jaw.validate();
  std::vector<ActuationPoint> out;
  out.reserve(static_cast<std::size_t>(jaw.steps) + 1);
  for (int i = 0; i <= jaw.steps; ++i) {
    ActuationPoint p;
    p.displacement = jaw.shuttle_travel * i / jaw.steps;
    double f = 0.0;
    try {
      f = force_for_tip_deflection(spec, p.displacement, opts, &p.alpha);
    } catch (const Error& e) {
      throw ConvergenceError("actuation curve step " + std::to_string(i) + " (displacement " +
                             std::to_string(p.displacement) + " m): " + e.what());
    }
    p.tendon_force = jaw.jaw_count * f;
    const TipPose tip = tip_pose(p.alpha, spec.beam_length);
    p.jaw_gap = jaw.open_gap - 2.0 * (tip.y + jaw.arm_length * std::sin(tip.phi));
    out.push_back(p);
  }
  return out;
}

struct BenchSample {
  double tendon_force = 0.0;  // N
  double jaw_gap = 0.0;       // m
};

struct BenchDeviation {
  double max_relative = 0.0;
  double mean_relative = 0.0;
  int used = 0;
  int out_of_range = 0;  // bench forces beyond the modelled curve
};

/// Model-vs-bench gap deviation, interpolating the model curve at each bench force.
inline BenchDeviation bench_deviation(const std::vector<ActuationPoint>& curve,
                                      const std::vector<BenchSample>& bench) {
  if (bench.empty()) throw MissingDataError("no bench samples supplied");
  require(curve.size() >= 2, "actuation curve needs at least two points");
  BenchDeviation d;
  double sum = 0.0;
  for (const auto& b : bench) {
    if (b.tendon_force < curve.front().tendon_force || b.tendon_force > curve.back().tendon_force) {
      ++d.out_of_range;
      continue;
    }
    std::size_t i = 1;
    while (i + 1 < curve.size() && curve[i].tendon_force < b.tendon_force) ++i;
    const auto& lo = curve[i - 1];
    const auto& hi = curve[i];
    const double span = hi.tendon_force - lo.tendon_force;
    const double t = span > 0.0 ? (b.tendon_force - lo.tendon_force) / span : 0.0;
    const double model_gap = lo.jaw_gap + t * (hi.jaw_gap - lo.jaw_gap);
    const double rel = std::abs(model_gap - b.jaw_gap) / std::abs(b.jaw_gap);
    d.max_relative = std::max(d.max_relative, rel);
    sum += rel;
    ++d.used;
  }
  d.mean_relative = d.used > 0 ? sum / d.used : 0.0;
  return d;
}

// ---------------------------------------------------------------------------
// Geometry optimization

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }

  void validate() const {
    if (lower.size() != upper.size() || lower.empty()) {
      throw InfeasibleError("bounds: lower and upper must be non-empty and the same size");
    }
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
        throw InfeasibleError("bounds: empty box in coordinate " + std::to_string(i));
      }
    }
  }

  std::vector<double> clamp(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  }
};

using Objective = std::function<double(const std::vector<double>&)>;

struct OptimizeOptions {
  int max_evaluations = 4000;
  double x_tolerance = 1e-10;  // relative to box width
  double f_tolerance = 1e-14;
  int restarts = 2;
};

struct OptimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

/// Box-constrained Nelder-Mead. The initial simplex is fixed (box centre plus
/// a quarter-width step per axis), candidates are projected onto the box, and
/// the search restarts from the best vertex to escape early collapse.
inline OptimizeResult nelder_mead(const Objective& f, const Bounds& bounds,
                                  const OptimizeOptions& opts = {}) {
  bounds.validate();
  const std::size_t n = bounds.dim();
  std::vector<double> width(n);
  for (std::size_t i = 0; i < n; ++i) width[i] = bounds.upper[i] - bounds.lower[i];

  OptimizeResult res;
  const auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };

  std::vector<double> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = 0.5 * (bounds.lower[i] + bounds.upper[i]);
  res.x = start;
  res.value = eval(start);

  bool degenerate = true;
  for (double w : width) degenerate = degenerate && w == 0.0;
  if (degenerate) return res;

  for (int round = 0; round <= opts.restarts; ++round) {
    std::vector<std::vector<double>> simplex{res.x};
    std::vector<double> fv{res.value};
    const double frac = round == 0 ? 0.25 : 0.05;
    for (std::size_t i = 0; i < n; ++i) {
      auto v = res.x;
      v[i] += (v[i] + frac * width[i] <= bounds.upper[i] ? 1.0 : -1.0) * frac * width[i];
      v = bounds.clamp(v);
      simplex.push_back(v);
      fv.push_back(eval(v));
    }
    while (res.evaluations < opts.max_evaluations) {
      std::vector<std::size_t> idx(n + 1);
      for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
      std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
      std::vector<std::vector<double>> s2;
      std::vector<double> f2;
      for (auto i : idx) {
        s2.push_back(simplex[i]);
        f2.push_back(fv[i]);
      }
      simplex.swap(s2);
      fv.swap(f2);

      double spread = 0.0;
      for (std::size_t v = 1; v <= n; ++v)
        for (std::size_t i = 0; i < n; ++i)
          if (width[i] > 0.0)
            spread = std::max(spread, std::abs(simplex[v][i] - simplex[0][i]) / width[i]);
      if (spread < opts.x_tolerance ||
          std::abs(fv[n] - fv[0]) <= opts.f_tolerance * (std::abs(fv[0]) + 1e-300))
        break;

      std::vector<double> centroid(n, 0.0);
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i] / n;
      const auto along = [&](double t) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (simplex[n][i] - centroid[i]);
        return bounds.clamp(x);
      };
      const auto xr = along(-1.0);
      const double fr = eval(xr);
      if (fr < fv[0]) {
        const auto xe = along(-2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[n] = xe;
          fv[n] = fe;
        } else {
          simplex[n] = xr;
          fv[n] = fr;
        }
      } else if (fr < fv[n - 1]) {
        simplex[n] = xr;
        fv[n] = fr;
      } else {
        const bool outside = fr < fv[n];
        const auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < std::min(fr, fv[n])) {
          simplex[n] = xc;
          fv[n] = fc;
        } else {
          for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i)
              simplex[v][i] = simplex[0][i] + 0.5 * (simplex[v][i] - simplex[0][i]);
            fv[v] = eval(simplex[v]);
          }
        }
      }
    }
    std::size_t best = 0;
    for (std::size_t v = 1; v < fv.size(); ++v)
      if (fv[v] < fv[best]) best = v;
    if (fv[best] <= res.value) {
      res.value = fv[best];
      res.x = simplex[best];
    }
  }
  return res;
}

/// Catheter tip deviation caused by the gripper reaction force acting at the
/// end of a rigid gripper body of length lever ahead of the catheter tip.
inline double reaction_tip_deviation(const magnetics::CatheterParams& cat, double force,
                                     double lever) {
  cat.validate();
  const double ei = cat.youngs_modulus * cat.second_moment();
  const double l = cat.length;
  return std::abs(force) / ei * (l * l * l / 3.0 + lever * l * l + lever * lever * l);
}

/// Design problem for the built-in objective. Parameters are (beam_length,
/// thickness); everything else comes from the base spec.
struct GripperDesignProblem {
  GripperSpec base;
  magnetics::CatheterParams catheter;
  JawGeometry jaw;
  double min_jaw_stiffness = 5.0;   // N/m per jaw, holding requirement
  double penalty_weight = 1.0e3;
  double body_length = 2.0e-3;      // rigid gripper housing beyond the blades, m

  GripperSpec spec_for(const std::vector<double>& x) const {
    GripperSpec s = base;
    s.beam_length = x.at(0);
    s.thickness = x.at(1);
    return s;
  }

  /// mSCR tip deviation at full jaw closure plus a relative penalty when the
  /// blades are too soft to hold a grasp.
  double operator()(const std::vector<double>& x) const {
    const GripperSpec s = spec_for(x);
    const double f = jaw.jaw_count * force_for_tip_deflection(s, jaw.shuttle_travel);
    const double dev = reaction_tip_deviation(catheter, f, body_length + s.beam_length);
    const double k = 3.0 * s.bending_stiffness() / std::pow(s.beam_length, 3);
    const double short_fall = std::max(0.0, 1.0 - k / min_jaw_stiffness);
    return dev + penalty_weight * short_fall * short_fall * catheter.length;
  }
};

inline OptimizeResult optimize_geometry(const Bounds& bounds, const Objective& objective,
                                        const OptimizeOptions& opts = {}) {
  return nelder_mead(objective, bounds, opts);
}

/// Best of n uniform samples in the box; used as a reference for the optimizer.
inline OptimizeResult random_search(const Objective& f, const Bounds& bounds, int samples,
                                    std::uint64_t seed) {
  bounds.validate();
  std::mt19937_64 rng(seed);
  OptimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<double> x(bounds.dim());
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::uniform_real_distribution<double>(bounds.lower[i], bounds.upper[i])(rng);
    }
    const double v = f(x);
    ++best.evaluations;
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Pre-twisted blade frequency

/// w_bar = w sqrt(rho A L^4 / sqrt(E I_xx E I_yy))
inline double twisted_frequency(const GripperSpec& spec, double w) {
  spec.validate();
  const double e = spec.youngs_modulus;
  const double l4 = std::pow(spec.beam_length, 4);
  return w * std::sqrt(spec.density * spec.area() * l4 / std::sqrt(e * spec.i_xx() * e * spec.i_yy()));
}

/// First cantilever bending mode in rad/s using I_eff = sqrt(I_xx I_yy).
inline double first_mode_estimate(const GripperSpec& spec) {
  spec.validate();
  const double i_eff = std::sqrt(spec.i_xx() * spec.i_yy());
  const double beta = 1.8751;
  return beta * beta *
         std::sqrt(spec.youngs_modulus * i_eff / (spec.density * spec.area() * std::pow(spec.beam_length, 4)));
}

struct BandSeparation {
  double blade_hz = 0.0;
  double shell_hz = 0.0;
  double gap_hz = 0.0;  // shell minus blade
  double ratio = 0.0;   // shell / blade
};

inline BandSeparation shell_separation(const GripperSpec& spec, double shell_hz = 1.0e6) {
  BandSeparation b;
  b.blade_hz = first_mode_estimate(spec) / (2.0 * kPi);
  b.shell_hz = shell_hz;
  b.gap_hz = shell_hz - b.blade_hz;
  b.ratio = shell_hz / b.blade_hz;
  return b;
}

}  // namespace mscr::gripper
