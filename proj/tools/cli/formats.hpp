#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "json.hpp"

#include "jointaxis/calibration.hpp"
#include "jointaxis/evaluation.hpp"
#include "jointaxis/simulator.hpp"
#include "jointaxis/solver.hpp"

namespace jointaxis::cli {

using nlohmann::json;

// Settings shared by estimate and evaluate. Every field may come from a
// config file and then be overridden by flags.
struct RunConfig {
  SolverConfig solver;
  std::optional<NoiseModel> noise = NoiseModel{};  // nullopt means "from-stationary"
  MethodSpec method = MethodSpec::combined_weighted;
  std::size_t segments = 100;
  std::size_t window = 500;
  std::uint64_t seed = 1;
  int starts = 8;
  int smooth = 1;  // moving-average width, 1 is off
  std::optional<std::pair<double, double>> stationary_range;
  unsigned threads = 0;
};

json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const json& j, const std::string& what);

json to_json(const NoiseModel& n);
NoiseModel noise_from_json(const json& j);

json to_json(const SolverConfig& c);
SolverConfig solver_from_json(const json& j, SolverConfig base = {});

json to_json(const HingeScenario& s);
// Missing keys keep the defaults of `base`.
HingeScenario scenario_from_json(const json& j, HingeScenario base = {});

RunConfig run_config_from_json(const json& j, RunConfig base = {});

json truth_json(const Simulation& sim);
AxisPair reference_from_truth(const json& truth);

json to_json(const SensorCalibration& c);
SensorCalibration sensor_calibration_from_json(const json& j);
json to_json(const PairCalibration& c, std::pair<double, double> range);

json to_json(const EstimationResult& r);

json to_json(const EvaluationReport& r);
std::string report_csv(const EvaluationReport& r);
std::string segments_csv(const EvaluationReport& r, const RecordingPair& recording);

// "t0:t1" with t0 < t1.
std::pair<double, double> parse_range(const std::string& s);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Fixed formatting so equal inputs give equal bytes.
std::string dump(const json& j);

}  // namespace jointaxis::cli
