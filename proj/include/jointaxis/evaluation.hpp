// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jointaxis/kinematics.hpp"
#include "jointaxis/recording.hpp"
#include "jointaxis/residuals.hpp"
#include "jointaxis/solver.hpp"

namespace jointaxis {

enum class MethodSpec { gyro_only, acc_only, combined_unweighted, combined_weighted };

inline constexpr std::array<MethodSpec, 4> kAllMethods = {
    MethodSpec::gyro_only, MethodSpec::acc_only, MethodSpec::combined_unweighted,
    MethodSpec::combined_weighted};

std::string_view to_string(MethodSpec method);
MethodSpec parse_method(std::string_view s);

/// Residual weights a method uses; only combined_weighted reads `noise`.
ResidualWeights weights_for(MethodSpec method, const NoiseModel& noise);

/// Angle between two unit vectors in degrees, in [0, 180].
/// Throws NormViolation unless both are unit within 1e-6.
double angular_deviation(const Vec3& a, const Vec3& b);

struct MadSad {
  double mad = 0.0;  // degrees
  double sad = 0.0;  // degrees; 0 for a single pair
};

/// Mean and sample std of the angular deviation over all unordered pairs.
/// Throws ArgumentError for fewer than 2 estimates.
MadSad mad_sad(std::span<const Vec3> estimates);

/// Negates both axes together when that brings j1 closer to the reference.
AxisPair resolve_sign(const AxisPair& estimate, const Vec3& reference_j1);

struct SegmentWindow {
  std::size_t start = 0;
  std::size_t count = 0;
};

/// M windows of N consecutive samples with evenly spaced starts
/// floor(m (len - N) / (M - 1)). Throws ArgumentError when len < N or M < 1.
std::vector<SegmentWindow> segment_dataset(std::size_t length, std::size_t segments,
                                           std::size_t window);

/// True when consecutive windows share samples.
bool windows_overlap(std::span<const SegmentWindow> windows);

struct SegmentEstimate {
  std::size_t start = 0;
  AxisPair axes;  // sign-resolved
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  double error_j1 = 0.0;  // degrees vs reference
  double error_j2 = 0.0;
};

struct AxisMetrics {
  double mad = 0.0;
  double sad = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;
};

struct MethodReport {
  MethodSpec method = MethodSpec::combined_weighted;
  AxisMetrics j1;
  AxisMetrics j2;
  int correct_pairing = 0;  // segments with j2 error below 90 degrees
  int non_converged = 0;
  std::vector<SegmentEstimate> segments;
};

struct EvaluationReport {
  std::size_t segment_count = 0;
  std::size_t window = 0;
  std::uint64_t seed = 0;
  NoiseModel noise;
  AxisPair reference;
  std::vector<MethodReport> methods;
  std::vector<std::string> warnings;

  const MethodReport& method(MethodSpec m) const;
};

struct EvaluationOptions {
  std::vector<MethodSpec> methods{kAllMethods.begin(), kAllMethods.end()};
  std::size_t segments = 100;
  std::size_t window = 500;
  std::uint64_t seed = 1;
  NoiseModel noise;
  SolverConfig solver;
  unsigned threads = 0;  // 0 picks hardware concurrency
};

/// Segments the recording, draws one uniform initial guess per segment
/// (shared by all methods), solves once per method, resolves the sign
/// against the reference j1 and aggregates the metrics.
EvaluationReport run_evaluation(const RecordingPair& recording, const AxisPair& reference,
                                const EvaluationOptions& options);

}  // namespace jointaxis
