#include "cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cli/formats.hpp"
#include "jointaxis/calibration.hpp"
#include "jointaxis/errors.hpp"
#include "jointaxis/evaluation.hpp"
#include "jointaxis/recording.hpp"
#include "jointaxis/simulator.hpp"
#include "jointaxis/solver.hpp"

namespace jointaxis::cli {

namespace {

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> axis_mode;
  std::optional<std::string> speed_profile;
  std::optional<double> duration;
  std::optional<double> stationary;
  bool noise_free = false;
  std::string output;
};

struct CalibrateArgs {
  std::string recording;
  std::string stationary_range;
  std::string stationary_file;
  double gravity = kStandardGravity;
  std::string output;
};

// Flags shared by estimate and evaluate; unset ones leave the config alone.
struct RunArgs {
  std::string recording;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> methods;
  std::optional<std::size_t> segments;
  std::optional<std::size_t> window;
  std::optional<std::string> stationary_range;
  std::optional<int> starts;
  std::optional<int> smooth;
  std::optional<unsigned> threads;
  std::string calibration;
  std::string truth;
  std::string output;
};

struct TableArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<std::size_t> segments;
  std::optional<std::size_t> window;
  std::optional<unsigned> threads;
  std::string output;
};

std::string strip_suffix(std::string s, const std::string& suffix) {
  if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0)
    s.resize(s.size() - suffix.size());
  return s;
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string format_vec(const Vec3& v) {
  return "(" + fixed(v.x(), 4) + ", " + fixed(v.y(), 4) + ", " + fixed(v.z(), 4) + ")";
}

// Speed of the hinge itself, |R1 w1 - R2 w2|, over the moving part.
RateStats joint_rate_stats(const GroundTruth& gt) {
  std::vector<double> v;
  for (std::size_t k = 0; k < gt.t.size(); ++k) {
    if (gt.t[k] < gt.scenario.stationary_duration) continue;
    v.push_back((gt.R1[k] * gt.omega1[k] - gt.R2[k] * gt.omega2[k]).norm());
  }
  RateStats out;
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) {
    out.max = std::max(out.max, x);
    sum += x;
  }
  out.mean = sum / v.size();
  double var = 0.0;
  for (double x : v) var += (x - out.mean) * (x - out.mean);
  out.sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
  return out;
}

ReadResult load_recording(const std::string& path, std::ostream& err) {
  ReadResult r = read_recording_csv_file(path);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  return r;
}

HingeScenario scenario_for(const SimulateArgs& a) {
  HingeScenario s;
  s.noise = NoiseModel{};
  if (!a.config.empty()) {
    json j = read_json_file(a.config);
    s = scenario_from_json(j.contains("scenario") ? j["scenario"] : j, s);
  }
  if (a.seed) s.seed = *a.seed;
  if (a.axis_mode) s.axis_mode = parse_axis_mode(*a.axis_mode);
  if (a.speed_profile) s.speed_profile = parse_speed_profile(*a.speed_profile);
  if (a.duration) s.duration = *a.duration;
  if (a.stationary) s.stationary_duration = *a.stationary;
  if (a.noise_free) s.noise.reset();
  s.validate();
  return s;
}

RunConfig config_for(const RunArgs& a) {
  RunConfig c;
  if (!a.config.empty()) c = run_config_from_json(read_json_file(a.config));
  if (a.seed) c.seed = *a.seed;
  if (a.methods.size() == 1) c.method = parse_method(a.methods.front());
  if (a.segments) c.segments = *a.segments;
  if (a.window) c.window = *a.window;
  if (a.stationary_range) c.stationary_range = parse_range(*a.stationary_range);
  if (a.starts) c.starts = *a.starts;
  if (a.smooth) c.smooth = *a.smooth;
  if (a.threads) c.threads = *a.threads;
  return run_config_from_json(json::object(), c);  // re-validate after overrides
}

// Calibration, noise model and motion samples ready for the solver.
struct Prepared {
  RecordingPair motion;
  NoiseModel noise;
  std::optional<PairCalibration> calibration;
};

Prepared prepare(const RecordingPair& rec, const RunConfig& cfg, const std::string& calibration_file,
                 std::ostream& err) {
  Prepared p;
  std::optional<SensorCalibration> c1, c2;
  std::optional<NoiseModel> file_noise;
  if (!calibration_file.empty()) {
    json j = read_json_file(calibration_file);
    if (!j.contains("sensor1") || !j.contains("sensor2"))
      throw ConfigError("calibration file needs 'sensor1' and 'sensor2'");
    c1 = sensor_calibration_from_json(j["sensor1"]);
    c2 = sensor_calibration_from_json(j["sensor2"]);
    if (j.contains("noise")) file_noise = noise_from_json(j["noise"]);
  }

  std::vector<SamplePair> motion;
  if (cfg.stationary_range) {
    auto [t0, t1] = *cfg.stationary_range;
    auto rest = select_time_range(rec.samples, t0, t1);
    if (rest.empty()) throw ConfigError("stationary range holds no samples");
    p.calibration = calibrate_pair(rest);
    for (const auto& w : p.calibration->warnings) err << "warning: " << w << "\n";
    if (!c1) {
      c1 = p.calibration->sensor1;
      c2 = p.calibration->sensor2;
    }
    for (const auto& s : rec.samples)
      if (s.t < t0 || s.t > t1) motion.push_back(s);
  } else {
    motion = rec.samples;
  }

  if (p.calibration) {
    p.noise = p.calibration->noise;
  } else if (file_noise) {
    p.noise = *file_noise;
  } else if (cfg.noise) {
    p.noise = *cfg.noise;
  } else {
    throw ConfigError("noise is \"from-stationary\" but no stationary range or calibration was given");
  }

  p.motion.samples = std::move(motion);
  p.motion.sample_rate = rec.sample_rate;
  p.motion.metadata = rec.metadata;
  if (c1) p.motion = apply_calibration(p.motion, *c1, *c2);
  if (cfg.smooth > 1) p.motion = moving_average(p.motion, cfg.smooth);
  return p;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  HingeScenario sc = scenario_for(a);
  Simulation sim = simulate(sc);
  std::string prefix = strip_suffix(a.output, ".csv");

  std::ostringstream csv;
  write_recording_csv(csv, sim.recording);
  write_text_file(prefix + ".csv", csv.str());
  write_text_file(prefix + ".truth.json", dump(truth_json(sim)));

  RateStats rs = joint_rate_stats(sim.truth);
  RateStats sensor = gyro_rate_stats(sim.recording);
  out << "wrote " << prefix << ".csv (" << sim.recording.size() << " samples at "
      << sim.recording.sample_rate << " Hz) and " << prefix << ".truth.json\n"
      << "axis mode: " << to_string(sc.axis_mode) << ", speed profile: "
      << to_string(sc.speed_profile) << ", duration: " << sc.duration << " s motion + "
      << sc.stationary_duration << " s rest\n"
      << "joint angular rate [rad/s]: max " << fixed(rs.max) << ", mean " << fixed(rs.mean)
      << ", sd " << fixed(rs.sd) << "\n"
      << "sensor angular rate [rad/s]: max " << fixed(sensor.max) << ", mean " << fixed(sensor.mean)
      << ", sd " << fixed(sensor.sd) << "\n";
  return kExitOk;
}

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.stationary_range.empty() == a.stationary_file.empty())
    throw ConfigError("give exactly one of --stationary-range and --stationary-file");

  std::vector<SamplePair> rest;
  std::pair<double, double> range;
  if (!a.stationary_file.empty()) {
    auto r = load_recording(a.stationary_file, err);
    rest = r.recording.samples;
    if (rest.empty()) throw ParseError(0, "stationary file holds no samples");
    range = {rest.front().t, rest.back().t};
  } else {
    if (a.recording.empty()) throw ConfigError("a recording is required with --stationary-range");
    range = parse_range(a.stationary_range);
    auto r = load_recording(a.recording, err);
    rest = select_time_range(r.recording.samples, range.first, range.second);
    if (rest.empty()) throw ConfigError("stationary range holds no samples");
  }

  PairCalibration cal = calibrate_pair(rest, a.gravity);
  for (const auto& w : cal.warnings) err << "warning: " << w << "\n";
  std::string text = dump(to_json(cal, range));
  if (a.output.empty()) {
    out << text;
  } else {
    write_text_file(a.output, text);
    out << "wrote " << a.output << " from " << rest.size() << " samples, w0 = " << fixed(cal.w0())
        << "\n";
  }
  return kExitOk;
}

int cmd_estimate(const RunArgs& a, std::ostream& out, std::ostream& err) {
  if (a.methods.size() > 1) throw ConfigError("estimate takes a single --method");
  RunConfig cfg = config_for(a);
  auto rec = load_recording(a.recording, err);
  Prepared p = prepare(rec.recording, cfg, a.calibration, err);

  ResidualWeights w = weights_for(cfg.method, p.noise);
  EstimationResult r =
      estimate_axes_multistart(p.motion.samples, w, cfg.solver, cfg.starts, cfg.seed);

  json j = to_json(r);
  j["method"] = std::string(to_string(cfg.method));
  j["noise"] = to_json(p.noise);
  j["w0"] = base_weight(p.noise);
  j["samples"] = p.motion.size();
  j["starts"] = cfg.starts;
  j["seed"] = cfg.seed;
  std::string text = dump(j);
  if (a.output.empty()) {
    out << text;
  } else {
    write_text_file(a.output, text);
    out << "j1 = " << format_vec(r.axes.j1) << "\nj2 = " << format_vec(r.axes.j2) << "\ncost "
        << r.final_cost << " after " << r.iterations << " iterations: " << r.diagnostic << "\n";
  }
  if (cfg.method == MethodSpec::gyro_only)
    err << "note: gyro_only leaves the relative sign of j1 and j2 undetermined\n";
  if (!r.converged) {
    err << "error: estimation did not converge: " << r.diagnostic << "\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

void print_report(const EvaluationReport& rep, std::ostream& out) {
  out << std::left << std::setw(22) << "method" << std::right << std::setw(9) << "MAD j1"
      << std::setw(9) << "SAD j1" << std::setw(9) << "MAD j2" << std::setw(9) << "SAD j2"
      << std::setw(9) << "pairing" << std::setw(8) << "failed" << "\n";
  for (const auto& m : rep.methods) {
    out << std::left << std::setw(22) << to_string(m.method) << std::right << std::setw(9)
        << fixed(m.j1.mad) << std::setw(9) << fixed(m.j1.sad) << std::setw(9) << fixed(m.j2.mad)
        << std::setw(9) << fixed(m.j2.sad) << std::setw(9) << m.correct_pairing << std::setw(8)
        << m.non_converged << "\n";
  }
}

int cmd_evaluate(const RunArgs& a, std::ostream& out, std::ostream& err) {
  if (a.truth.empty()) throw ConfigError("--truth is required");
  RunConfig cfg = config_for(a);
  AxisPair ref = reference_from_truth(read_json_file(a.truth));
  auto rec = load_recording(a.recording, err);
  Prepared p = prepare(rec.recording, cfg, a.calibration, err);

  EvaluationOptions opt;
  if (!a.methods.empty()) {
    opt.methods.clear();
    for (const auto& m : a.methods) opt.methods.push_back(parse_method(m));
  }
  opt.segments = cfg.segments;
  opt.window = cfg.window;
  opt.seed = cfg.seed;
  opt.noise = p.noise;
  opt.solver = cfg.solver;
  opt.threads = cfg.threads;
  EvaluationReport rep = run_evaluation(p.motion, ref, opt);
  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";

  std::string prefix = strip_suffix(a.output, ".json");
  write_text_file(prefix + ".report.json", dump(to_json(rep)));
  write_text_file(prefix + ".report.csv", report_csv(rep));
  write_text_file(prefix + ".segments.csv", segments_csv(rep, p.motion));
  print_report(rep, out);
  return kExitOk;
}

int cmd_table(const TableArgs& a, std::ostream& out) {
  HingeScenario base;
  base.noise = NoiseModel{};
  if (!a.config.empty()) {
    json j = read_json_file(a.config);
    base = scenario_from_json(j.contains("scenario") ? j["scenario"] : j, base);
  }
  if (a.seed) base.seed = *a.seed;
  if (a.duration) base.duration = *a.duration;
  if (!base.noise) throw ConfigError("the table needs a noise model");

  EvaluationOptions opt;
  if (a.segments) opt.segments = *a.segments;
  if (a.window) opt.window = *a.window;
  if (a.threads) opt.threads = *a.threads;
  opt.seed = base.seed;
  opt.noise = *base.noise;

  std::string csv = "axis_mode,speed_profile,method,mad_j1_deg,sad_j1_deg,mad_j2_deg,sad_j2_deg,correct_pairing,non_converged\n";
  json rows = json::array();
  for (AxisMode mode : {AxisMode::free, AxisMode::vertical, AxisMode::horizontal}) {
    for (SpeedProfileKind speed :
         {SpeedProfileKind::fast, SpeedProfileKind::slow, SpeedProfileKind::mixed}) {
      HingeScenario sc = base;
      sc.axis_mode = mode;
      sc.speed_profile = speed;
      Simulation sim = simulate(sc);
      AxisPair ref{sc.j1_true, sc.j2_true};
      EvaluationReport rep = run_evaluation(sim.recording, ref, opt);
      out << to_string(mode) << " / " << to_string(speed) << "\n";
      print_report(rep, out);
      for (const auto& m : rep.methods) {
        std::ostringstream line;
        line.precision(17);
        line << to_string(mode) << "," << to_string(speed) << "," << to_string(m.method) << ","
             << m.j1.mad << "," << m.j1.sad << "," << m.j2.mad << "," << m.j2.sad << ","
             << m.correct_pairing << "," << m.non_converged << "\n";
        csv += line.str();
      }
      rows.push_back({{"axis_mode", std::string(to_string(mode))},
                      {"speed_profile", std::string(to_string(speed))},
                      {"report", to_json(rep)}});
    }
  }
  std::string prefix = strip_suffix(a.output, ".csv");
  write_text_file(prefix + ".csv", csv);
  write_text_file(prefix + ".json", dump({{"scenario", to_json(base)}, {"rows", rows}}));
  return kExitOk;
}

void add_run_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("recording", a.recording, "Recording CSV")->required();
  cmd->add_option("--config", a.config, "Run config JSON");
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->add_option("--stationary-range", a.stationary_range,
                  "Stationary interval t0:t1 used to calibrate and estimate noise");
  cmd->add_option("--calibration", a.calibration, "Calibration JSON from the calibrate command");
  cmd->add_option("--smooth", a.smooth, "Moving-average width (odd, 1 = off)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hinge joint axis estimation from two IMUs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "jointaxis 1.0");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic hinge recording");
  c_sim->add_option("--config", sim.config, "Scenario JSON");
  c_sim->add_option("--seed", sim.seed, "Random seed");
  c_sim->add_option("--axis-mode", sim.axis_mode, "free, vertical or horizontal");
  c_sim->add_option("--speed-profile", sim.speed_profile, "fast, slow or mixed");
  c_sim->add_option("--duration", sim.duration, "Seconds of motion");
  c_sim->add_option("--stationary", sim.stationary, "Seconds of rest before the motion");
  c_sim->add_flag("--noise-free", sim.noise_free, "Disable measurement noise");
  c_sim->add_option("--output,-o", sim.output, "Output prefix (writes .csv and .truth.json)")
      ->required();

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Estimate bias, gain and noise from rest data");
  c_cal->add_option("recording", cal.recording, "Recording CSV");
  c_cal->add_option("--stationary-range", cal.stationary_range, "Stationary interval t0:t1");
  c_cal->add_option("--stationary-file", cal.stationary_file, "CSV holding only rest data");
  c_cal->add_option("--gravity", cal.gravity, "Local gravity magnitude");
  c_cal->add_option("--output,-o", cal.output, "Calibration JSON (stdout if omitted)");

  RunArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate the joint axis from a recording");
  add_run_flags(c_est, est);
  c_est->add_option("--method", est.methods,
                    "gyro_only, acc_only, combined_unweighted or combined_weighted");
  c_est->add_option("--starts", est.starts, "Random starts");
  c_est->add_option("--output,-o", est.output, "Result JSON (stdout if omitted)");

  RunArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Segment-wise evaluation against a reference");
  add_run_flags(c_ev, ev);
  c_ev->add_option("--truth", ev.truth, "JSON with reference axes j1 and j2")->required();
  c_ev->add_option("--method", ev.methods, "Methods to run (repeatable, default all)");
  c_ev->add_option("--segments", ev.segments, "Number of segments M");
  c_ev->add_option("--window", ev.window, "Samples per segment N");
  c_ev->add_option("--threads", ev.threads, "Worker threads (0 = all cores)");
  c_ev->add_option("--output,-o", ev.output,
                   "Output prefix (writes .report.json, .report.csv, .segments.csv)")
      ->required();

  TableArgs tab;
  auto* c_tab = app.add_subcommand("table", "Evaluate all nine synthetic scenarios");
  c_tab->add_option("--config", tab.config, "Base scenario JSON");
  c_tab->add_option("--seed", tab.seed, "Random seed");
  c_tab->add_option("--duration", tab.duration, "Seconds of motion per scenario");
  c_tab->add_option("--segments", tab.segments, "Number of segments M");
  c_tab->add_option("--window", tab.window, "Samples per segment N");
  c_tab->add_option("--threads", tab.threads, "Worker threads (0 = all cores)");
  c_tab->add_option("--output,-o", tab.output, "Output prefix (writes .csv and .json)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_cal->parsed()) return cmd_calibrate(cal, out, err);
    if (c_est->parsed()) return cmd_estimate(est, out, err);
    if (c_ev->parsed()) return cmd_evaluate(ev, out, err);
    if (c_tab->parsed()) return cmd_table(tab, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotStationaryError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace jointaxis::cli
