// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jointaxis/kinematics.hpp"
#include "jointaxis/residuals.hpp"

namespace jointaxis {

struct SolverConfig {
  int max_iterations = 200;
  double step_tolerance = 1e-10;      // rad, norm of the parameter step
  double gradient_tolerance = 1e-10;  // norm of dV/dx
  double damping_initial = 0.0;       // 0 selects pure Gauss-Newton
  double line_search_shrink = 0.5;
  int max_backtracks = 30;

  /// Throws ConfigError on non-positive tolerances or counts.
  void validate() const;
};

struct TraceEntry {
  int iteration = 0;
  double cost = 0.0;
  double step_norm = 0.0;
};

struct EstimationResult {
  AxisParams params;
  AxisPair axes;
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
  std::vector<TraceEntry> trace;
};

/// V(x), the sum of squared weighted residuals. Throws ArgumentError on empty data.
double cost(const AxisParams& x, std::span<const SamplePair> data, const ResidualWeights& weights);

/// Gauss-Newton from x0 with backtracking and Levenberg fallback.
/// Throws ArgumentError for fewer than 4 samples or a non-finite x0.
EstimationResult estimate_axes(std::span<const SamplePair> data, const ResidualWeights& weights,
                               const SolverConfig& config, const AxisParams& x0);

/// Both axes independently uniform on the unit sphere; deterministic in seed.
AxisParams random_initialization(std::uint64_t seed);

/// Seed for run `index` of a family of runs sharing `seed`. Index 0 maps to seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Lowest-cost result of n_starts runs, run i starting at
/// random_initialization(derive_seed(seed, i)).
EstimationResult estimate_axes_multistart(std::span<const SamplePair> data,
                                          const ResidualWeights& weights,
                                          const SolverConfig& config, int n_starts,
                                          std::uint64_t seed);

}  // namespace jointaxis
