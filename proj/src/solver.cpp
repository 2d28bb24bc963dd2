// SPDX-License-Identifier: Apache-2.0

#include "jointaxis/solver.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "jointaxis/errors.hpp"

namespace jointaxis {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kLevenbergStart = 1e-6;
constexpr double kLevenbergMax = 1e6;
constexpr double kArmijo = 1e-4;

using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, 4>;

bool finite_params(const AxisParams& x) { return x.as_vector().allFinite(); }

double next_damping(double lambda) { return lambda <= 0.0 ? kLevenbergStart : lambda * 10.0; }

// Solves (H + lambda * scale * I) s = b. Returns false when the damped
// matrix is numerically singular.
bool solve_normal(const Eigen::Matrix4d& h, const Eigen::Vector4d& b, double lambda,
                  Eigen::Vector4d& step) {
  double scale = h.diagonal().maxCoeff();
  if (!(scale > 0.0)) scale = 1.0;
  const Eigen::Matrix4d a = h + lambda * scale * Eigen::Matrix4d::Identity();
  if (!a.allFinite()) return false;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(a, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) return false;
  step = a.ldlt().solve(b);
  return step.allFinite();
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations < 1 || max_backtracks < 1) {
    throw ConfigError("solver iteration and backtrack limits must be >= 1");
  }
  if (!(step_tolerance > 0.0) || !(gradient_tolerance > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (!(damping_initial >= 0.0)) throw ConfigError("initial damping must be >= 0");
  if (!(line_search_shrink > 0.0 && line_search_shrink < 1.0)) {
    throw ConfigError("line search shrink factor must lie in (0, 1)");
  }
}

double cost(const AxisParams& x, std::span<const SamplePair> data,
            const ResidualWeights& weights) {
  if (data.empty()) throw ArgumentError("cost: no samples");
  Eigen::VectorXd r;
  evaluate_residuals(data, x, weights, r, nullptr);
  return r.squaredNorm();
}

EstimationResult estimate_axes(std::span<const SamplePair> data, const ResidualWeights& weights,
                               const SolverConfig& config, const AxisParams& x0) {
  config.validate();
  weights.validate();
  if (data.size() < 4) {
    throw ArgumentError("estimate_axes: need at least 4 samples, got " +
                        std::to_string(data.size()));
  }
  if (!finite_params(x0)) throw ArgumentError("estimate_axes: non-finite initial parameters");

  EstimationResult result;
  AxisParams x = wrap_params(x0);
  Eigen::VectorXd r;
  Jacobian jac;
  evaluate_residuals(data, x, weights, r, &jac);
  double v = r.squaredNorm();
  Eigen::Vector4d grad = 2.0 * jac.transpose() * r;
  result.trace.push_back({0, v, 0.0});

  double lambda = config.damping_initial;
  int iteration = 0;
  while (true) {
    if (!std::isfinite(v) || !grad.allFinite()) {
      result.diagnostic = "non-finite cost or gradient";
      break;
    }
    if (grad.norm() < config.gradient_tolerance) {
      result.converged = true;
      result.diagnostic = "gradient tolerance reached";
      break;
    }
    if (iteration >= config.max_iterations) {
      result.diagnostic = "iteration limit reached";
      break;
    }

    const Eigen::Matrix4d h = jac.transpose() * jac;
    const Eigen::Vector4d b = -(jac.transpose() * r);
    Eigen::Vector4d step;
    while (!solve_normal(h, b, lambda, step)) {
      lambda = next_damping(lambda);
      if (lambda > kLevenbergMax) break;
    }
    if (lambda > kLevenbergMax) {
      result.diagnostic = "normal equations singular at every damping level";
      break;
    }

    const double step_norm = step.norm();
    if (step_norm < config.step_tolerance) {
      result.converged = true;
      result.diagnostic = "step tolerance reached";
      break;
    }

    const Eigen::Vector4d xv = x.as_vector();
    const double slope = grad.dot(step);
    double alpha = 1.0;
    bool accepted = false;
    AxisParams x_try;
    double v_try = v;
    for (int k = 0; k <= config.max_backtracks; ++k) {
      x_try = wrap_params(AxisParams::from_vector(xv + alpha * step));
      v_try = cost(x_try, data, weights);
      if (std::isfinite(v_try) && v_try < v && v_try <= v + kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= config.line_search_shrink;
    }

    ++iteration;
    if (!accepted) {
      // No decrease along the Gauss-Newton direction: fall back to a
      // damped, more gradient-like step on the next pass.
      lambda = next_damping(lambda);
      if (lambda > kLevenbergMax) {
        result.diagnostic = "line search failed at every damping level";
        break;
      }
      continue;
    }

    x = x_try;
    evaluate_residuals(data, x, weights, r, &jac);
    v = r.squaredNorm();
    grad = 2.0 * jac.transpose() * r;
    const double taken = alpha * step_norm;
    result.trace.push_back({iteration, v, taken});
    lambda = config.damping_initial;
    if (taken < config.step_tolerance) {
      result.converged = true;
      result.diagnostic = "step tolerance reached";
      break;
    }
  }

  result.params = x;
  result.axes = axes_from_params(x);
  result.final_cost = v;
  result.iterations = iteration;
  return result;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  if (index == 0) return seed;
  return splitmix64(seed ^ splitmix64(index));
}

AxisParams random_initialization(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto draw_axis = [&gen](double& theta, double& phi) {
    const double z = 2.0 * unit_uniform(gen) - 1.0;
    theta = std::asin(z);
    phi = wrap_angle(kPi * (2.0 * unit_uniform(gen) - 1.0));
  };
  AxisParams x;
  draw_axis(x.theta1, x.phi1);
  draw_axis(x.theta2, x.phi2);
  return x;
}

EstimationResult estimate_axes_multistart(std::span<const SamplePair> data,
                                          const ResidualWeights& weights,
                                          const SolverConfig& config, int n_starts,
                                          std::uint64_t seed) {
  if (n_starts < 1) throw ArgumentError("estimate_axes_multistart: n_starts must be >= 1");
  EstimationResult best;
  bool have_best = false;
  bool any_converged = false;
  for (int i = 0; i < n_starts; ++i) {
    const AxisParams x0 = random_initialization(derive_seed(seed, static_cast<std::uint64_t>(i)));
    EstimationResult run = estimate_axes(data, weights, config, x0);
    any_converged = any_converged || run.converged;
    if (!have_best || run.final_cost < best.final_cost) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!any_converged) best.diagnostic = "no run converged; best: " + best.diagnostic;
  return best;
}

}  // namespace jointaxis
