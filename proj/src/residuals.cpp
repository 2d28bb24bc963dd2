// SPDX-License-Identifier: Apache-2.0

#include "jointaxis/residuals.hpp"

#include <cmath>

#include "jointaxis/errors.hpp"

namespace jointaxis {

void NoiseModel::validate() const {
  if (!(std::isfinite(sigma_gyro) && sigma_gyro > 0.0) ||
      !(std::isfinite(sigma_acc) && sigma_acc > 0.0)) {
    throw ConfigError("noise standard deviations must be positive (sigma_gyro=" +
                      std::to_string(sigma_gyro) + ", sigma_acc=" + std::to_string(sigma_acc) +
                      ")");
  }
}

double ResidualWeights::acc(const SamplePair& s) const {
  switch (acc_rule) {
    case AccWeighting::norm_difference:
      return acc_weight(s.acc1, s.acc2);
    case AccWeighting::constant:
      break;
  }
  return acc_constant;
}

void ResidualWeights::validate() const {
  if (!std::isfinite(w_gyro) || w_gyro < 0.0) throw ConfigError("gyro weight must be >= 0");
  if (acc_rule == AccWeighting::constant && (!std::isfinite(acc_constant) || acc_constant < 0.0)) {
    throw ConfigError("accelerometer weight must be >= 0");
  }
  if (w_gyro == 0.0 && acc_rule == AccWeighting::constant && acc_constant == 0.0) {
    throw ConfigError("both residual weights are zero");
  }
}

double base_weight(const NoiseModel& noise) {
  noise.validate();
  return noise.sigma_acc / noise.sigma_gyro;
}

double acc_weight(const Vec3& acc1, const Vec3& acc2) {
  const double d = acc1.norm() - acc2.norm();
  return std::sqrt(1.0 / (1.0 + d * d));
}

double gyro_residual(const SamplePair& s, const AxisParams& x, double w_gyro) {
  const Vec3 j1 = spherical_to_axis(x.theta1, x.phi1);
  const Vec3 j2 = spherical_to_axis(x.theta2, x.phi2);
  return w_gyro * (perp_angular_speed(s.gyr1, j1) - perp_angular_speed(s.gyr2, j2));
}

double acc_residual(const SamplePair& s, const AxisParams& x, double w_acc) {
  const Vec3 j1 = spherical_to_axis(x.theta1, x.phi1);
  const Vec3 j2 = spherical_to_axis(x.theta2, x.phi2);
  return w_acc * (j1.dot(s.acc1) - j2.dot(s.acc2));
}

namespace {

// d‖w x j‖/dj, zero at the cone point.
Vec3 perp_speed_gradient(const Vec3& omega, const Vec3& j) {
  const Vec3 c = omega.cross(j);
  const double n = c.norm();
  if (n < kGyroSingularity) return Vec3::Zero();
  return c.cross(omega) / n;
}

struct Frame {
  Vec3 j1, j2;
  Eigen::Matrix<double, 3, 2> d1, d2;

  explicit Frame(const AxisParams& x)
      : j1(spherical_to_axis(x.theta1, x.phi1)),
        j2(spherical_to_axis(x.theta2, x.phi2)),
        d1(spherical_axis_jacobian(x.theta1, x.phi1)),
        d2(spherical_axis_jacobian(x.theta2, x.phi2)) {}

  // Chain rule through dj/dx for per-axis gradients g1 (w.r.t. j1), g2 (w.r.t. j2).
  Eigen::Vector4d chain(const Vec3& g1, const Vec3& g2) const {
    Eigen::Vector4d out;
    out.head<2>() = d1.transpose() * g1;
    out.tail<2>() = d2.transpose() * g2;
    return out;
  }
};

}  // namespace

Eigen::Vector4d gyro_residual_gradient(const SamplePair& s, const AxisParams& x, double w_gyro) {
  const Frame f(x);
  return w_gyro * f.chain(perp_speed_gradient(s.gyr1, f.j1), -perp_speed_gradient(s.gyr2, f.j2));
}

Eigen::Vector4d acc_residual_gradient(const SamplePair& s, const AxisParams& x, double w_acc) {
  const Frame f(x);
  return w_acc * f.chain(s.acc1, -s.acc2);
}

void evaluate_residuals(std::span<const SamplePair> data, const AxisParams& x,
                        const ResidualWeights& weights, Eigen::VectorXd& residuals,
                        Eigen::Matrix<double, Eigen::Dynamic, 4>* jacobian) {
  const Frame f(x);
  const auto n = static_cast<Eigen::Index>(data.size());
  residuals.resize(2 * n);
  if (jacobian) jacobian->resize(2 * n, 4);

  for (Eigen::Index k = 0; k < n; ++k) {
    const SamplePair& s = data[static_cast<std::size_t>(k)];
    const double wa = weights.acc(s);
    const double wg = weights.w_gyro;
    residuals[2 * k] = wg * (s.gyr1.cross(f.j1).norm() - s.gyr2.cross(f.j2).norm());
    residuals[2 * k + 1] = wa * (f.j1.dot(s.acc1) - f.j2.dot(s.acc2));
    if (jacobian) {
      jacobian->row(2 * k) =
          wg * f.chain(perp_speed_gradient(s.gyr1, f.j1), -perp_speed_gradient(s.gyr2, f.j2))
                   .transpose();
      jacobian->row(2 * k + 1) = wa * f.chain(s.acc1, -s.acc2).transpose();
    }
  }
}

}  // namespace jointaxis
