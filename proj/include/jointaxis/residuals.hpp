// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include <Eigen/Core>

#include "jointaxis/kinematics.hpp"

namespace jointaxis {

/// One synchronized reading of both IMUs.
struct SamplePair {
  double t = 0.0;  // s
  Vec3 gyr1 = Vec3::Zero();  // rad/s
  Vec3 acc1 = Vec3::Zero();  // m/s^2
  Vec3 gyr2 = Vec3::Zero();
  Vec3 acc2 = Vec3::Zero();
};

/// Worst-case per-axis noise standard deviations of the sensor types.
struct NoiseModel {
  double sigma_gyro = 0.0050;  // rad/s
  double sigma_acc = 0.0346;   // m/s^2

  /// Throws ConfigError unless both deviations are finite and positive.
  void validate() const;
};

/// How the accelerometer residual of a sample is weighted.
enum class AccWeighting {
  constant,         // w_a(k) = acc_constant
  norm_difference,  // w_a(k) = acc_weight(a1, a2)
};

struct ResidualWeights {
  double w_gyro = 1.0;
  AccWeighting acc_rule = AccWeighting::constant;
  double acc_constant = 1.0;

  double acc(const SamplePair& s) const;

  /// Throws ConfigError on negative weights or when both terms are off.
  void validate() const;
};

/// sigma_acc / sigma_gyro.
double base_weight(const NoiseModel& noise);

/// sqrt(1 / (1 + (‖a1‖ - ‖a2‖)^2)), in (0, 1].
double acc_weight(const Vec3& acc1, const Vec3& acc2);

/// Below this perpendicular rate a sensor's gyro-gradient contribution is zero.
inline constexpr double kGyroSingularity = 1e-9;

double gyro_residual(const SamplePair& s, const AxisParams& x, double w_gyro);
double acc_residual(const SamplePair& s, const AxisParams& x, double w_acc);

Eigen::Vector4d gyro_residual_gradient(const SamplePair& s, const AxisParams& x, double w_gyro);
Eigen::Vector4d acc_residual_gradient(const SamplePair& s, const AxisParams& x, double w_acc);

/// Stacked residuals [e_w(0), e_a(0), e_w(1), e_a(1), ...] and, if `jacobian`
/// is non-null, their 2N x 4 Jacobian with respect to the spherical parameters.
void evaluate_residuals(std::span<const SamplePair> data, const AxisParams& x,
                        const ResidualWeights& weights, Eigen::VectorXd& residuals,
                        Eigen::Matrix<double, Eigen::Dynamic, 4>* jacobian);

}  // namespace jointaxis
