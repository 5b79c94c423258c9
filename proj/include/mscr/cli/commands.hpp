#pragma once
// Batch subcommands as pure functions of a resolved config. Each returns the
// files it wants written plus a short text summary for the terminal; the
// executable takes care of flags, output directories and exit codes.

#include <mscr/balloon.hpp>
#include <mscr/cli/config.hpp>
#include <mscr/cli/output.hpp>
#include <mscr/gripper.hpp>
#include <mscr/magnetics.hpp>
#include <mscr/perception_io.hpp>
#include <mscr/sim/session.hpp>

#include <future>
#include <thread>

namespace mscr::cli {

inline constexpr const char* kDataDirEnv = "MSCR_DATA_DIR";
inline constexpr const char* kServiceAddrEnv = "MSCR_SERVICE_ADDR";

struct CommandSpec {
  std::string name;
  std::string description;
  std::vector<std::string> keys;  // config keys exposed as flags
  bool writes_run_dir = true;
};

struct CommandResult {
  Outputs files;
  std::string summary;
  std::vector<std::string> warnings;
};

inline ConfigSchema make_schema() {
  ConfigSchema s;
  using T = ParamType;
  const auto p = [&](std::string key, T type, nlohmann::json def, std::string help) -> Param& {
    s.add(Param{std::move(key), type, std::move(def), std::move(help), {}, {}, false, {}, {}});
    return s.last();
  };
  // Shared by the batch commands.
  p("seed", T::integer_list, {1}, "Seeds; one unit of work per seed where randomness is involved").min = 0;
  p("label", T::string, "", "Run directory name under out_dir/<command>/ (default: UTC timestamp)");
  p("out_dir", T::string, "out", "Root of the output tree");
  p("data_dir", T::string, "data", "Data directory (scenarios/, run store)").env = kDataDirEnv;

  // Balloon.
  {
    auto& x = p("balloon.r_in_mm", T::number, 0.5, "Reference inner radius, mm");
    x.min = 0.0;
    x.exclusive_min = true;
  }
  {
    auto& x = p("balloon.r_out_mm", T::number, 0.7, "Reference outer radius, mm");
    x.min = 0.0;
    x.exclusive_min = true;
  }
  {
    auto& x = p("balloon.height_mm", T::number, 6.0, "Balloon height, mm");
    x.min = 0.0;
    x.exclusive_min = true;
  }
  {
    auto& x = p("balloon.c1_kpa", T::number, 100.0, "Yeoh C1, kPa");
    x.min = 0.0;
    x.exclusive_min = true;
  }
  p("balloon.c2_kpa", T::number, 1.5, "Yeoh C2, kPa");
  p("balloon.c3_kpa", T::number, 0.01, "Yeoh C3, kPa");
  p("balloon.burst_mean_kpa", T::number, 80.0, "Mean burst pressure, kPa (0 disables the burst cap)").min = 0.0;
  p("balloon.burst_sd_kpa", T::number, 2.0, "Burst pressure standard deviation, kPa").min = 0.0;
  p("balloon.safety_factor", T::number, 1.5, "Divisor applied to the pressure cap").min = 1.0;
  p("report.lambda_min", T::number, 1.0, "First inner stretch sampled").min = 1.0;
  p("report.lambda_max", T::number, 5.0, "Last inner stretch sampled").min = 1.0;
  p("report.samples", T::integer, 200, "Number of stretch samples (rows)").min = 1;
  p("report.p_ex_kpa", T::number, 0.0, "External pressure for the axial force, kPa").min = 0.0;
  p("report.mode_n", T::integer, 1, "Axisymmetric mode number screened").min = 1;

  // Workspace.
  p("field.b_min_mT", T::number, 16.0, "Lower field bound at the target, mT").min = 0.0;
  p("field.b_max_mT", T::number, 25.0, "Upper field bound at the target, mT").min = 0.0;
  {
    auto& x = p("epm.remanence_t", T::number, 1.45, "Magnet remanence, T");
    x.min = 0.0;
    x.exclusive_min = true;
  }
  {
    auto& x = p("epm.diameter_mm", T::number, 100.0, "Cylindrical magnet diameter, mm");
    x.min = 0.0;
    x.exclusive_min = true;
  }
  {
    auto& x = p("epm.height_mm", T::number, 100.0, "Cylindrical magnet height, mm");
    x.min = 0.0;
    x.exclusive_min = true;
  }
  p("workspace.grid", T::integer, 64, "Cells per axis for the grid estimate").min = 8;
  p("workspace.samples", T::integer, 1000000, "Monte-Carlo samples per seed").min = 1;
  p("workspace.policy", T::string, "free", "Moment orientation policy").choices = {"free", "axial"};

  // Gripper.
  const auto positive = [&](std::string key, double def, std::string help) {
    auto& x = p(std::move(key), T::number, def, std::move(help));
    x.min = 0.0;
    x.exclusive_min = true;
  };
  positive("gripper.length_mm", 4.0, "Blade length, mm");
  positive("gripper.width_mm", 1.0, "Blade width, mm");
  positive("gripper.thickness_mm", 0.1, "Blade thickness in the bending direction, mm");
  positive("gripper.youngs_gpa", 2.0, "Young's modulus, GPa");
  positive("gripper.density", 1200.0, "Density, kg/m^3");
  p("gripper.twist_deg", T::number, 0.0, "Total pre-twist, degrees");
  positive("jaw.travel_mm", 0.4, "Shuttle travel, mm");
  p("jaw.steps", T::integer, 20, "Displacement steps").min = 1;
  p("jaw.count", T::integer, 2, "Number of jaws driven by the tendon").min = 1;
  positive("jaw.open_gap_mm", 2.0, "Jaw gap at zero displacement, mm");
  p("jaw.arm_mm", T::number, 1.5, "Rigid jaw arm length, mm").min = 0.0;

  // Scenario runs.
  p("run.scenario", T::string, "aligned", "Scenario file path, or a name looked up in <data_dir>/scenarios and ./scenarios");
  p("run.mode", T::string, "both", "Which controller drives the runs").choices = {"autonomous", "operator", "manual",
                                                                                   "both"};
  p("run.workers", T::integer, 0, "Parallel runs (0: one per hardware thread)").min = 0;
  p("run.logs", T::boolean, true, "Write the per-run event logs");

  // Detector evaluation.
  p("eval.pred", T::string, "", "Predictions, JSON lines");
  p("eval.gt", T::string, "", "Ground truth, JSON lines");
  {
    auto& x = p("eval.iou_threshold", T::number, 0.5, "IoU needed for a match");
    x.min = 0.0;
    x.exclusive_min = true;
    x.max = 0.999999;
  }

  // Replay.
  p("replay.log", T::string, "", "Event log (JSON lines) to recompute metrics from");

  // Service.
  p("service.addr", T::string, "127.0.0.1:7878", "Service endpoint host:port").env = kServiceAddrEnv;
  p("service.duration_s", T::number, 0.0, "Stop serving after this many seconds (0: until interrupted)").min = 0.0;
  p("service.timeout_ms", T::integer, 2000, "Health-check timeout, ms").min = 1;
  return s;
}

inline const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = [] {
    const std::vector<std::string> common{"seed", "label", "out_dir", "data_dir"};
    const auto with = [&](std::vector<std::string> extra) {
      auto v = common;
      v.insert(v.end(), extra.begin(), extra.end());
      return v;
    };
    return std::vector<CommandSpec>{
        {"balloon-report", "Pressure and axial-force curves, stability margins and the safe range of one balloon",
         with({"balloon.r_in_mm", "balloon.r_out_mm", "balloon.height_mm", "balloon.c1_kpa", "balloon.c2_kpa",
               "balloon.c3_kpa", "balloon.burst_mean_kpa", "balloon.burst_sd_kpa", "balloon.safety_factor",
               "report.lambda_min", "report.lambda_max", "report.samples", "report.p_ex_kpa", "report.mode_n"})},
        {"workspace", "Feasible EPM workspace for a field band, analytic and Monte-Carlo",
         with({"field.b_min_mT", "field.b_max_mT", "epm.remanence_t", "epm.diameter_mm", "epm.height_mm",
               "workspace.grid", "workspace.samples", "workspace.policy"})},
        {"gripper-curve", "Tendon force and jaw gap against shuttle displacement",
         with({"gripper.length_mm", "gripper.width_mm", "gripper.thickness_mm", "gripper.youngs_gpa",
               "gripper.density", "gripper.twist_deg", "jaw.travel_mm", "jaw.steps", "jaw.count", "jaw.open_gap_mm",
               "jaw.arm_mm"})},
        {"run", "Closed-loop scenario runs per seed with a per-mode metrics table",
         with({"run.scenario", "run.mode", "run.workers", "run.logs"})},
        {"eval-detector", "Precision, recall and F1 of predicted boxes against ground truth",
         with({"eval.pred", "eval.gt", "eval.iou_threshold"})},
        {"replay", "Recompute run metrics from an event log", with({"replay.log"})},
        {"serve", "Start the session service", {"data_dir", "service.addr", "service.duration_s"}, false},
        {"health", "Check that a session service answers", {"service.addr", "service.timeout_ms"}, false},
    };
  }();
  return specs;
}

inline const CommandSpec& command_spec(const std::string& name) {
  for (const auto& c : command_specs())
    if (c.name == name) return c;
  throw DomainError("unknown command '" + name + "'");
}

/// Keys that name where outputs go rather than what is computed; they stay
/// out of the manifest so relabelled runs compare equal.
inline bool is_placement_key(const std::string& key) { return key == "label" || key == "out_dir"; }

inline std::vector<long> seeds_of(const nlohmann::json& cfg) { return cfg.at("seed").get<std::vector<long>>(); }

namespace detail {

inline double at(const nlohmann::json& cfg, const std::string& dotted) {
  std::string p = "/" + dotted;
  for (auto& c : p)
    if (c == '.') c = '/';
  return cfg.at(nlohmann::json::json_pointer(p)).get<double>();
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw MissingDataError("cannot open " + what + " '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Stat {
  double mean = 0.0;
  double sd = 0.0;
};

inline Stat stat(const std::vector<double>& v) {
  Stat s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline balloon::BalloonSpec balloon_spec(const nlohmann::json& cfg) {
  using detail::at;
  balloon::BalloonSpec s;
  s.r_in = at(cfg, "balloon.r_in_mm") * 1e-3;
  s.r_out = at(cfg, "balloon.r_out_mm") * 1e-3;
  s.height = at(cfg, "balloon.height_mm") * 1e-3;
  s.yeoh = {at(cfg, "balloon.c1_kpa") * 1e3, at(cfg, "balloon.c2_kpa") * 1e3, at(cfg, "balloon.c3_kpa") * 1e3};
  if (at(cfg, "balloon.burst_mean_kpa") > 0.0)
    s.burst = balloon::BurstStats{at(cfg, "balloon.burst_mean_kpa") * 1e3, at(cfg, "balloon.burst_sd_kpa") * 1e3};
  if (!(s.r_in < s.r_out)) throw SchemaError("$.balloon.r_in_mm", "must be < balloon.r_out_mm");
  s.validate();
  return s;
}

inline CommandResult balloon_report(const nlohmann::json& cfg) {
  using detail::at;
  const auto spec = balloon_spec(cfg);
  const double lo = at(cfg, "report.lambda_min");
  const double hi = at(cfg, "report.lambda_max");
  if (hi < lo) throw SchemaError("$.report.lambda_max", "must be >= report.lambda_min");
  const long n = lo == hi ? 1 : cfg.at("report").at("samples").get<long>();
  const double p_ex = at(cfg, "report.p_ex_kpa") * 1e3;
  const int mode_n = cfg.at("report").at("mode_n").get<int>();

  std::ostringstream csv;
  csv << "lambda_in,lambda_ex,delta_p_pa,delta_p_quadrature_pa,delta_p_rel_diff,f_ex_n,f_ex_quadrature_n,"
         "f_ex_rel_diff,slope_pa,prismatic_margin,asymmetric_margin,stable\n";
  double worst_p = 0.0, worst_f = 0.0;
  long unstable = 0;
  for (long i = 0; i < n; ++i) {
    const double l = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double dp = balloon::delta_p(spec, l);
    const double dq = balloon::delta_p_quadrature(spec, l);
    const double f = balloon::axial_force(spec, l, p_ex);
    const double fq = balloon::axial_force_quadrature(spec, l, p_ex);
    const auto st = balloon::stability_screen(spec, 1.0, mode_n, l);
    const bool stable = st.prismatic_ok && st.asymmetric_ok;
    const double rp = detail::rel_diff(dp, dq), rf = detail::rel_diff(f, fq);
    worst_p = std::max(worst_p, rp);
    worst_f = std::max(worst_f, rf);
    if (!stable) ++unstable;
    csv << num(l) << ',' << num(balloon::lambda_ex_of(spec, l)) << ',' << num(dp) << ',' << num(dq) << ','
        << num(rp) << ',' << num(f) << ',' << num(fq) << ',' << num(rf) << ',' << num(balloon::delta_p_slope(spec, l))
        << ',' << num(st.prismatic_margin) << ',' << num(st.asymmetric_margin) << ',' << (stable ? 1 : 0) << '\n';
  }

  const auto axi = balloon::stability_screen(spec, 1.0, mode_n, 1.0);
  nlohmann::json report{{"rows", n},
                        {"max_rel_diff_delta_p", worst_p},
                        {"max_rel_diff_f_ex", worst_f},
                        {"unstable_rows", unstable},
                        {"diameter_to_thickness", spec.diameter_to_thickness()},
                        {"thick_wall_rule", spec.thick_wall_rule()},
                        {"axisymmetric",
                         {{"mode_n", mode_n},
                          {"margin", axi.axisymmetric_margin},
                          {"ok", axi.axisymmetric_ok},
                          {"critical_mode", axi.critical_mode}}}};
  const auto safe = balloon::safe_range(spec, at(cfg, "balloon.safety_factor"), std::max(hi, 1.0 + 1e-9));
  report["safe_range"] = {{"p_max_safe_pa", safe.p_max_safe},
                          {"lambda_at_p_max", safe.lambda_at_p_max},
                          {"has_limit_point", safe.has_limit_point},
                          {"limit_pressure_pa", safe.limit_pressure},
                          {"limit_lambda", safe.limit_lambda},
                          {"burst_cap_pa", safe.burst_cap ? nlohmann::json(*safe.burst_cap) : nlohmann::json()}};
  CommandResult r;
  r.files["balloon_curve.csv"] = csv.str();
  r.files["report.json"] = report.dump(2) + "\n";
  std::ostringstream sum;
  sum << n << " rows, max rel diff closed form vs quadrature: delta_p " << num(worst_p) << ", f_ex " << num(worst_f)
      << "\nsafe pressure " << num(safe.p_max_safe) << " Pa at lambda_in " << num(safe.lambda_at_p_max) << "\n";
  r.summary = sum.str();
  if (!spec.thick_wall_rule()) r.warnings.push_back("D/t <= 10: outside the thick-wall rule");
  return r;
}

// ---------------------------------------------------------------------------

inline CommandResult workspace_report(const nlohmann::json& cfg) {
  using detail::at;
  magnetics::FieldTask task{at(cfg, "field.b_min_mT") * 1e-3, at(cfg, "field.b_max_mT") * 1e-3};
  if (task.b_min > task.b_max) throw SchemaError("$.field.b_min_mT", "must be <= field.b_max_mT");
  const double moment = magnetics::cylinder_moment(at(cfg, "epm.remanence_t"), at(cfg, "epm.diameter_mm") * 1e-3,
                                                   at(cfg, "epm.height_mm") * 1e-3);
  const auto policy = cfg.at("workspace").at("policy") == "axial" ? magnetics::OrientationPolicy::axial
                                                                   : magnetics::OrientationPolicy::free;
  const auto rep =
      magnetics::feasible_workspace(moment, task, {cfg.at("workspace").at("grid").get<int>()}, policy);
  const auto samples = cfg.at("workspace").at("samples").get<std::size_t>();
  constexpr double kReportedVolume = 0.05;  // m^3, quoted for the clinical platform

  std::ostringstream csv;
  csv << "seed,monte_carlo_volume_m3,analytic_volume_m3,rel_diff\n";
  nlohmann::json mc = nlohmann::json::array();
  for (long seed : seeds_of(cfg)) {
    const double v = rep.empty || !std::isfinite(rep.volume)
                         ? 0.0
                         : magnetics::monte_carlo_workspace_volume(moment, task, samples,
                                                                   static_cast<std::uint64_t>(seed), policy);
    const double d = detail::rel_diff(v, rep.empty ? 0.0 : rep.volume);
    csv << seed << ',' << num(v) << ',' << num(rep.empty ? 0.0 : rep.volume) << ',' << num(d) << '\n';
    mc.push_back({{"seed", seed}, {"volume_m3", v}, {"rel_diff", d}});
  }
  const auto finite_or_null = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); };
  nlohmann::json j{{"moment_am2", moment},
                   {"empty", rep.empty},
                   {"inner_radius_m", rep.inner_radius},
                   {"outer_radius_m", finite_or_null(rep.outer_radius)},
                   {"volume_m3", rep.empty ? nlohmann::json(0.0) : finite_or_null(rep.volume)},
                   {"grid_volume_m3", rep.empty ? nlohmann::json(0.0) : finite_or_null(rep.grid_volume)},
                   {"grid_resolution", rep.grid_resolution},
                   {"monte_carlo", mc},
                   {"reported_volume_m3", kReportedVolume},
                   {"ratio_to_reported", rep.empty ? 0.0 : rep.volume / kReportedVolume}};
  CommandResult r;
  r.files["workspace.json"] = j.dump(2) + "\n";
  r.files["workspace.csv"] = csv.str();
  std::ostringstream sum;
  if (rep.empty) {
    sum << "workspace is empty for this task\n";
  } else {
    sum << "shell " << num(rep.inner_radius) << " m to " << num(rep.outer_radius) << " m, volume " << num(rep.volume)
        << " m^3 (grid " << num(rep.grid_volume) << ", reported platform figure " << kReportedVolume << ")\n";
    for (const auto& m : mc)
      sum << "  seed " << m.at("seed") << ": Monte-Carlo " << num(m.at("volume_m3").get<double>()) << " m^3, rel diff "
          << num(m.at("rel_diff").get<double>()) << "\n";
  }
  r.summary = sum.str();
  return r;
}

// ---------------------------------------------------------------------------

inline CommandResult gripper_curve(const nlohmann::json& cfg) {
  using detail::at;
  gripper::GripperSpec g;
  g.beam_length = at(cfg, "gripper.length_mm") * 1e-3;
  g.width = at(cfg, "gripper.width_mm") * 1e-3;
  g.thickness = at(cfg, "gripper.thickness_mm") * 1e-3;
  g.youngs_modulus = at(cfg, "gripper.youngs_gpa") * 1e9;
  g.density = at(cfg, "gripper.density");
  g.twist_angle = deg2rad(at(cfg, "gripper.twist_deg"));
  gripper::JawGeometry jaw;
  jaw.shuttle_travel = at(cfg, "jaw.travel_mm") * 1e-3;
  jaw.steps = cfg.at("jaw").at("steps").get<int>();
  jaw.jaw_count = cfg.at("jaw").at("count").get<int>();
  jaw.open_gap = at(cfg, "jaw.open_gap_mm") * 1e-3;
  jaw.arm_length = at(cfg, "jaw.arm_mm") * 1e-3;
  const auto curve = gripper::actuation_curve(g, jaw);
  const double lin = 3.0 * g.bending_stiffness() / std::pow(g.beam_length, 3);

  std::ostringstream csv;
  csv << "displacement_m,tendon_force_n,linear_force_n,jaw_gap_m,alpha0,alpha1,alpha2\n";
  for (const auto& p : curve)
    csv << num(p.displacement) << ',' << num(p.tendon_force) << ',' << num(jaw.jaw_count * lin * p.displacement)
        << ',' << num(p.jaw_gap) << ',' << num(p.alpha[0]) << ',' << num(p.alpha[1]) << ',' << num(p.alpha[2])
        << '\n';
  const auto& last = curve.back();
  nlohmann::json j{{"bending_stiffness_nm2", g.bending_stiffness()},
                   {"linear_stiffness_n_per_m", lin},
                   {"first_mode_hz", gripper::first_mode_estimate(g) / (2.0 * kPi)},
                   {"max_tendon_force_n", last.tendon_force},
                   {"closed_gap_m", last.jaw_gap},
                   {"points", curve.size()}};
  CommandResult r;
  r.files["gripper_curve.csv"] = csv.str();
  r.files["gripper.json"] = j.dump(2) + "\n";
  r.summary = std::to_string(curve.size()) + " points, tendon force at full travel " + num(last.tendon_force) +
              " N, jaw gap " + num(last.jaw_gap) + " m\n";
  return r;
}

// ---------------------------------------------------------------------------

/// Resolves a scenario argument: an existing path, else <data_dir>/scenarios/<name>.json,
/// else ./scenarios/<name>.json.
inline std::filesystem::path find_scenario(const std::string& arg, const std::string& data_dir) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(arg)) return arg;
  for (const fs::path& dir : {fs::path(data_dir) / "scenarios", fs::path("scenarios")}) {
    const auto p = dir / (arg + ".json");
    if (fs::is_regular_file(p)) return p;
  }
  throw MissingDataError("scenario '" + arg + "' not found (tried the path, " + data_dir +
                         "/scenarios and ./scenarios)");
}

struct SeedRun {
  std::string mode;
  long seed = 0;
  sim::RunResult result;
};

inline std::string runs_csv(const std::vector<SeedRun>& runs) {
  std::ostringstream o;
  o << "mode,seed,success,end_reason,flag,insertion_time_s,advance_time_s,epm_path_length_m,epm_turning_sum_rad,"
       "pause_episodes,override_events,fbg_flags,rejected_commands,max_b_mT,hold_force_n,final_insertion_mm,ticks\n";
  for (const auto& r : runs) {
    const auto& m = r.result.metrics;
    o << r.mode << ',' << r.seed << ',' << (m.success ? 1 : 0) << ',' << m.end_reason << ','
      << (m.end_reason == "timeout" ? "timeout" : "") << ',' << num(m.insertion_time) << ',' << num(m.advance_time)
      << ',' << num(m.epm_path_length) << ',' << num(m.epm_turning_sum) << ',' << m.pause_episodes << ','
      << m.override_events << ',' << m.fbg_flags << ',' << m.rejected_commands << ',' << num(m.max_b_mag * 1e3)
      << ',' << num(m.hold_force) << ',' << num(m.final_insertion * 1e3) << ',' << m.ticks << '\n';
  }
  return o.str();
}

inline std::pair<std::string, std::string> summary_tables(const std::vector<SeedRun>& runs,
                                                          const std::vector<std::string>& modes) {
  struct Col {
    const char* name;
    double (*get)(const sim::RunMetrics&);
  };
  static const Col cols[] = {
      {"insertion_time_s", [](const sim::RunMetrics& m) { return m.insertion_time; }},
      {"advance_time_s", [](const sim::RunMetrics& m) { return m.advance_time; }},
      {"epm_path_length_m", [](const sim::RunMetrics& m) { return m.epm_path_length; }},
      {"epm_turning_sum_rad", [](const sim::RunMetrics& m) { return m.epm_turning_sum; }},
      {"pause_episodes", [](const sim::RunMetrics& m) { return static_cast<double>(m.pause_episodes); }},
      {"override_events", [](const sim::RunMetrics& m) { return static_cast<double>(m.override_events); }},
      {"max_b_mT", [](const sim::RunMetrics& m) { return m.max_b_mag * 1e3; }},
  };
  std::ostringstream csv, md;
  csv << "mode,n,successes,timeouts";
  md << "| mode | n | successes | timeouts |";
  for (const auto& c : cols) {
    csv << ',' << c.name << "_mean," << c.name << "_sd";
    md << ' ' << c.name << " |";
  }
  csv << '\n';
  md << "\n|---|---|---|---|";
  for (std::size_t i = 0; i < std::size(cols); ++i) md << "---|";
  md << '\n';
  for (const auto& mode : modes) {
    std::vector<const sim::RunMetrics*> ms;
    for (const auto& r : runs)
      if (r.mode == mode) ms.push_back(&r.result.metrics);
    long ok = 0, timeouts = 0;
    for (auto* m : ms) {
      ok += m->success ? 1 : 0;
      timeouts += m->end_reason == "timeout" ? 1 : 0;
    }
    csv << mode << ',' << ms.size() << ',' << ok << ',' << timeouts;
    md << "| " << mode << " | " << ms.size() << " | " << ok << " | " << timeouts << " |";
    for (const auto& c : cols) {
      std::vector<double> v;
      for (auto* m : ms) v.push_back(c.get(*m));
      const auto s = detail::stat(v);
      csv << ',' << num(s.mean) << ',' << num(s.sd);
      char cell[64];
      std::snprintf(cell, sizeof cell, " %.4g ± %.2g |", s.mean, s.sd);
      md << cell;
    }
    csv << '\n';
    md << '\n';
  }
  return {csv.str(), md.str()};
}

inline CommandResult run_scenarios(const nlohmann::json& cfg) {
  const auto path = find_scenario(cfg.at("run").at("scenario").get<std::string>(),
                                  cfg.at("data_dir").get<std::string>());
  const auto doc = parse_json(detail::read_file(path.string(), "scenario"));
  sim::Scenario base;
  try {
    base = sim::scenario_from_json(doc);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ":" + e.path(), e.message());
  }
  const std::string mode_arg = cfg.at("run").at("mode").get<std::string>();
  const std::vector<std::string> modes =
      mode_arg == "both" ? std::vector<std::string>{"autonomous", "operator"} : std::vector<std::string>{mode_arg};
  const auto seeds = seeds_of(cfg);

  std::vector<SeedRun> runs;
  for (const auto& m : modes)
    for (long s : seeds) runs.push_back({m, s, {}});
  long workers = cfg.at("run").at("workers").get<long>();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  // Each unit is independent; results land in their own slot so order never depends on scheduling.
  std::size_t next = 0;
  std::mutex mu;
  std::exception_ptr failure;
  const auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= runs.size() || failure) return;
        i = next++;
      }
      try {
        sim::Scenario sc = base;
        sc.seed = static_cast<std::uint64_t>(runs[i].seed);
        runs[i].result = sim::run_scenario(sc, sim::run_mode_from_name(runs[i].mode));
      } catch (...) {
        std::lock_guard lock(mu);
        failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (long w = 0; w < std::min<long>(workers, static_cast<long>(runs.size())); ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  CommandResult r;
  r.files["scenario.json"] = doc.dump(2) + "\n";
  r.files["runs.csv"] = runs_csv(runs);
  auto [csv, md] = summary_tables(runs, modes);
  r.files["summary.csv"] = csv;
  r.files["summary.md"] = md;
  if (cfg.at("run").at("logs").get<bool>()) {
    for (const auto& run : runs) {
      std::ostringstream log;
      run.result.write_log(log);
      r.files["logs/" + run.mode + "_seed" + std::to_string(run.seed) + ".jsonl"] = log.str();
    }
  }
  for (const auto& run : runs)
    if (run.result.metrics.end_reason == "timeout")
      r.warnings.push_back(run.mode + " seed " + std::to_string(run.seed) + " timed out");
  r.summary = md;
  return r;
}

// ---------------------------------------------------------------------------

inline CommandResult eval_detector(const nlohmann::json& cfg) {
  const auto& e = cfg.at("eval");
  const auto pred_path = e.at("pred").get<std::string>();
  const auto gt_path = e.at("gt").get<std::string>();
  if (pred_path.empty()) throw SchemaError("$.eval.pred", "required");
  if (gt_path.empty()) throw SchemaError("$.eval.gt", "required");
  const auto load = [](const std::string& path, const char* what) {
    std::istringstream in(detail::read_file(path, what));
    try {
      return perception::read_frames(in);
    } catch (const DomainError& err) {
      throw DomainError(path + ": " + err.what());
    }
  };
  const auto pred = load(pred_path, "predictions");
  const auto gt = load(gt_path, "ground truth");
  const auto m = perception::evaluate_detector(pred, gt, e.at("iou_threshold").get<double>());
  nlohmann::json j{{"precision", m.precision},
                   {"recall", m.recall},
                   {"f1", m.f1},
                   {"true_positives", m.true_positives},
                   {"false_positives", m.false_positives},
                   {"false_negatives", m.false_negatives},
                   {"warnings", m.warnings}};
  CommandResult r;
  r.files["metrics.json"] = j.dump(2) + "\n";
  r.summary = "precision " + num(m.precision) + "\nrecall " + num(m.recall) + "\nf1 " + num(m.f1) + "\n";
  r.warnings = m.warnings;
  return r;
}

inline CommandResult replay_log(const nlohmann::json& cfg) {
  const auto path = cfg.at("replay").at("log").get<std::string>();
  if (path.empty()) throw SchemaError("$.replay.log", "required");
  std::istringstream in(detail::read_file(path, "event log"));
  sim::RunMetrics m;
  try {
    m = sim::replay_metrics(in);
  } catch (const DomainError& err) {
    throw DomainError(path + ": " + err.what());
  }
  CommandResult r;
  r.files["metrics.json"] = sim::to_json(m).dump(2) + "\n";
  r.summary = sim::to_json(m).dump(2) + "\n";
  return r;
}

inline CommandResult run_batch_command(const std::string& name, const nlohmann::json& cfg) {
  if (name == "balloon-report") return balloon_report(cfg);
  if (name == "workspace") return workspace_report(cfg);
  if (name == "gripper-curve") return gripper_curve(cfg);
  if (name == "run") return run_scenarios(cfg);
  if (name == "eval-detector") return eval_detector(cfg);
  if (name == "replay") return replay_log(cfg);
  throw DomainError("'" + name + "' is not a batch command");
}

}  // namespace mscr::cli
