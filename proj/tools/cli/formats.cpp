#include "cli/formats.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "jointaxis/errors.hpp"

namespace jointaxis::cli {

namespace {

// Reads key into out when present; type mismatches become config errors.
template <typename T>
void take(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void take_vec(const json& j, const char* key, Vec3& out) {
  auto it = j.find(key);
  if (it != j.end() && !it->is_null()) out = vec_from_json(*it, key);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("'" + what + "' must be a 3-element array");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError("'" + what + "' must hold numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

json to_json(const NoiseModel& n) {
  return {{"sigma_gyro", n.sigma_gyro}, {"sigma_acc", n.sigma_acc}};
}

NoiseModel noise_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("noise must be an object");
  NoiseModel n;
  take(j, "sigma_gyro", n.sigma_gyro);
  take(j, "sigma_acc", n.sigma_acc);
  n.validate();
  return n;
}

json to_json(const SolverConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"step_tolerance", c.step_tolerance},
          {"gradient_tolerance", c.gradient_tolerance},
          {"damping_initial", c.damping_initial},
          {"line_search_shrink", c.line_search_shrink},
          {"max_backtracks", c.max_backtracks}};
}

SolverConfig solver_from_json(const json& j, SolverConfig c) {
  if (!j.is_object()) throw ConfigError("solver must be an object");
  take(j, "max_iterations", c.max_iterations);
  take(j, "step_tolerance", c.step_tolerance);
  take(j, "gradient_tolerance", c.gradient_tolerance);
  take(j, "damping_initial", c.damping_initial);
  take(j, "line_search_shrink", c.line_search_shrink);
  take(j, "max_backtracks", c.max_backtracks);
  c.validate();
  return c;
}

json to_json(const HingeScenario& s) {
  return {{"j1", vec_to_json(s.j1_true)},
          {"j2", vec_to_json(s.j2_true)},
          {"mount_twist1", s.mount_twist1},
          {"mount_twist2", s.mount_twist2},
          {"r1", vec_to_json(s.r1)},
          {"r2", vec_to_json(s.r2)},
          {"axis_mode", std::string(to_string(s.axis_mode))},
          {"speed_profile", std::string(to_string(s.speed_profile))},
          {"duration", s.duration},
          {"stationary_duration", s.stationary_duration},
          {"sample_rate", s.sample_rate},
          {"translation_amplitude", s.translation_amplitude},
          {"gravity", vec_to_json(s.gravity)},
          {"noise", s.noise ? to_json(*s.noise) : json(nullptr)},
          {"gyro_bias1", vec_to_json(s.gyro_bias1)},
          {"gyro_bias2", vec_to_json(s.gyro_bias2)},
          {"acc_scale1", s.acc_scale1},
          {"acc_scale2", s.acc_scale2},
          {"seed", s.seed}};
}

HingeScenario scenario_from_json(const json& j, HingeScenario s) {
  if (!j.is_object()) throw ConfigError("scenario must be an object");
  take_vec(j, "j1", s.j1_true);
  take_vec(j, "j2", s.j2_true);
  // axes given by hand need not be normalized
  if (j.contains("j1")) s.j1_true.normalize();
  if (j.contains("j2")) s.j2_true.normalize();
  take(j, "mount_twist1", s.mount_twist1);
  take(j, "mount_twist2", s.mount_twist2);
  take_vec(j, "r1", s.r1);
  take_vec(j, "r2", s.r2);
  std::string text;
  if (j.contains("axis_mode")) {
    take(j, "axis_mode", text);
    s.axis_mode = parse_axis_mode(text);
  }
  if (j.contains("speed_profile")) {
    take(j, "speed_profile", text);
    s.speed_profile = parse_speed_profile(text);
  }
  take(j, "duration", s.duration);
  take(j, "stationary_duration", s.stationary_duration);
  take(j, "sample_rate", s.sample_rate);
  take(j, "translation_amplitude", s.translation_amplitude);
  take_vec(j, "gravity", s.gravity);
  if (auto it = j.find("noise"); it != j.end()) {
    if (it->is_null() || (it->is_boolean() && !it->get<bool>())) {
      s.noise.reset();
    } else if (it->is_boolean()) {
      s.noise = NoiseModel{};
    } else {
      s.noise = noise_from_json(*it);
    }
  }
  take_vec(j, "gyro_bias1", s.gyro_bias1);
  take_vec(j, "gyro_bias2", s.gyro_bias2);
  take(j, "acc_scale1", s.acc_scale1);
  take(j, "acc_scale2", s.acc_scale2);
  take(j, "seed", s.seed);
  s.validate();
  return s;
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (auto it = j.find("solver"); it != j.end()) c.solver = solver_from_json(*it, c.solver);
  if (auto it = j.find("noise"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "from-stationary")
        throw ConfigError("noise must be an object or \"from-stationary\"");
      c.noise.reset();
    } else {
      c.noise = noise_from_json(*it);
    }
  }
  if (j.contains("method")) {
    std::string m;
    take(j, "method", m);
    c.method = parse_method(m);
  }
  take(j, "segments", c.segments);
  take(j, "window", c.window);
  take(j, "seed", c.seed);
  take(j, "starts", c.starts);
  take(j, "smooth", c.smooth);
  take(j, "threads", c.threads);
  if (auto it = j.find("stationary_range"); it != j.end() && !it->is_null()) {
    if (it->is_string()) {
      c.stationary_range = parse_range(it->get<std::string>());
    } else if (it->is_array() && it->size() == 2 && (*it)[0].is_number() && (*it)[1].is_number()) {
      c.stationary_range = {(*it)[0].get<double>(), (*it)[1].get<double>()};
      if (!(c.stationary_range->first < c.stationary_range->second))
        throw ConfigError("stationary_range must satisfy t0 < t1");
    } else {
      throw ConfigError("stationary_range must be \"t0:t1\" or [t0, t1]");
    }
  }
  if (c.starts < 1) throw ConfigError("starts must be >= 1");
  if (c.smooth < 1 || c.smooth % 2 == 0) throw ConfigError("smooth must be a positive odd width");
  c.solver.validate();
  return c;
}

json truth_json(const Simulation& sim) {
  const HingeScenario& s = sim.truth.scenario;
  return {{"j1", vec_to_json(s.j1_true)},
          {"j2", vec_to_json(s.j2_true)},
          {"r1", vec_to_json(s.r1)},
          {"r2", vec_to_json(s.r2)},
          {"joint_angle", sim.truth.joint_angle},
          {"scenario", to_json(s)}};
}

AxisPair reference_from_truth(const json& truth) {
  if (!truth.is_object() || !truth.contains("j1") || !truth.contains("j2"))
    throw ConfigError("ground truth needs 'j1' and 'j2'");
  AxisPair ref{vec_from_json(truth["j1"], "j1"), vec_from_json(truth["j2"], "j2")};
  if (ref.j1.norm() == 0.0 || ref.j2.norm() == 0.0) throw ConfigError("reference axes are zero");
  ref.j1.normalize();
  ref.j2.normalize();
  return ref;
}

json to_json(const SensorCalibration& c) {
  return {{"gyro_bias", vec_to_json(c.gyro_bias)},
          {"acc_gain", c.acc_gain},
          {"sigma_gyro", c.sigma_gyro},
          {"sigma_acc", c.sigma_acc}};
}

SensorCalibration sensor_calibration_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("sensor calibration must be an object");
  SensorCalibration c;
  take_vec(j, "gyro_bias", c.gyro_bias);
  take(j, "acc_gain", c.acc_gain);
  take(j, "sigma_gyro", c.sigma_gyro);
  take(j, "sigma_acc", c.sigma_acc);
  c.validate();
  return c;
}

json to_json(const PairCalibration& c, std::pair<double, double> range) {
  return {{"sensor1", to_json(c.sensor1)},
          {"sensor2", to_json(c.sensor2)},
          {"noise", to_json(c.noise)},
          {"w0", c.w0()},
          {"stationary_range", json::array({range.first, range.second})},
          {"warnings", c.warnings}};
}

json to_json(const EstimationResult& r) {
  json trace = json::array();
  for (const auto& e : r.trace)
    trace.push_back({{"iteration", e.iteration}, {"cost", e.cost}, {"step_norm", e.step_norm}});
  return {{"j1", vec_to_json(r.axes.j1)},
          {"j2", vec_to_json(r.axes.j2)},
          {"spherical",
           {{"theta1", r.params.theta1},
            {"phi1", r.params.phi1},
            {"theta2", r.params.theta2},
            {"phi2", r.params.phi2}}},
          {"cost", r.final_cost},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"diagnostic", r.diagnostic},
          {"trace", trace}};
}

json to_json(const EvaluationReport& r) {
  auto metrics = [](const AxisMetrics& m) {
    return json{{"mad_deg", m.mad}, {"sad_deg", m.sad}, {"mean_error_deg", m.mean_error},
                {"std_error_deg", m.std_error}};
  };
  json methods = json::array();
  for (const auto& m : r.methods) {
    json segs = json::array();
    for (const auto& s : m.segments) {
      segs.push_back({{"start", s.start},
                      {"j1", vec_to_json(s.axes.j1)},
                      {"j2", vec_to_json(s.axes.j2)},
                      {"cost", s.cost},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"error_j1_deg", s.error_j1},
                      {"error_j2_deg", s.error_j2}});
    }
    methods.push_back({{"method", std::string(to_string(m.method))},
                       {"j1", metrics(m.j1)},
                       {"j2", metrics(m.j2)},
                       {"correct_pairing", m.correct_pairing},
                       {"non_converged", m.non_converged},
                       {"segments", segs}});
  }
  return {{"segments", r.segment_count},
          {"window", r.window},
          {"seed", r.seed},
          {"noise", to_json(r.noise)},
          {"w0", base_weight(r.noise)},
          {"reference", {{"j1", vec_to_json(r.reference.j1)}, {"j2", vec_to_json(r.reference.j2)}}},
          {"methods", methods},
          {"warnings", r.warnings}};
}

std::string report_csv(const EvaluationReport& r) {
  std::string out = "method,axis,mad_deg,sad_deg,mean_error_deg,std_error_deg,correct_pairing,non_converged\n";
  for (const auto& m : r.methods) {
    for (int a = 0; a < 2; ++a) {
      const AxisMetrics& x = a == 0 ? m.j1 : m.j2;
      out += std::string(to_string(m.method)) + (a == 0 ? ",j1," : ",j2,") + num(x.mad) + "," +
             num(x.sad) + "," + num(x.mean_error) + "," + num(x.std_error) + "," +
             std::to_string(m.correct_pairing) + "," + std::to_string(m.non_converged) + "\n";
    }
  }
  return out;
}

std::string segments_csv(const EvaluationReport& r, const RecordingPair& recording) {
  std::string out = "method,segment,start,t_start,error_j1_deg,error_j2_deg,cost,iterations,converged\n";
  for (const auto& m : r.methods) {
    for (std::size_t i = 0; i < m.segments.size(); ++i) {
      const auto& s = m.segments[i];
      double t = s.start < recording.size() ? recording.samples[s.start].t : 0.0;
      out += std::string(to_string(m.method)) + "," + std::to_string(i) + "," +
             std::to_string(s.start) + "," + num(t) + "," + num(s.error_j1) + "," +
             num(s.error_j2) + "," + num(s.cost) + "," + std::to_string(s.iterations) + "," +
             (s.converged ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::pair<double, double> parse_range(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("range '" + s + "' must look like t0:t1");
  double a, b;
  try {
    std::size_t used = 0;
    std::string left = s.substr(0, colon), right = s.substr(colon + 1);
    a = std::stod(left, &used);
    if (used != left.size()) throw std::invalid_argument("");
    b = std::stod(right, &used);
    if (used != right.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ConfigError("range '" + s + "' must look like t0:t1");
  }
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw ConfigError("range '" + s + "' must satisfy t0 < t1");
  return {a, b};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw ConfigError("failed writing '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace jointaxis::cli
