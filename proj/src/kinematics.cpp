// SPDX-License-Identifier: Apache-2.0

#include "jointaxis/kinematics.hpp"

#include <cmath>

#include "jointaxis/errors.hpp"

namespace jointaxis {

bool is_finite(const Vec3& v) { return v.allFinite(); }

Mat3 rotational_acc_matrix(const Vec3& w, const Vec3& wd) {
  Mat3 k;
  k << -w.y() * w.y() - w.z() * w.z(), w.x() * w.y() - wd.z(), w.x() * w.z() + wd.y(),
      w.x() * w.y() + wd.z(), -w.x() * w.x() - w.z() * w.z(), w.y() * w.z() - wd.x(),
      w.x() * w.z() - wd.y(), w.y() * w.z() + wd.x(), -w.x() * w.x() - w.y() * w.y();
  return k;
}

Vec3 spherical_to_axis(double theta, double phi) {
  const double ct = std::cos(theta);
  return {ct * std::cos(phi), ct * std::sin(phi), std::sin(theta)};
}

Eigen::Matrix<double, 3, 2> spherical_axis_jacobian(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  Eigen::Matrix<double, 3, 2> d;
  d << -st * cp, -ct * sp,
       -st * sp, ct * cp,
       ct, 0.0;
  return d;
}

SphericalAngles axis_to_spherical(const Vec3& j) {
  const double n = j.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-6) {
    throw NormViolation("axis_to_spherical: expected a unit vector, norm is " +
                        std::to_string(n));
  }
  const Vec3 u = j / n;
  const double horizontal = std::hypot(u.x(), u.y());
  SphericalAngles out;
  out.theta = std::atan2(u.z(), horizontal);
  out.phi = horizontal == 0.0 ? 0.0 : wrap_angle(std::atan2(u.y(), u.x()));
  return out;
}

double perp_angular_speed(const Vec3& omega, const Vec3& j) { return omega.cross(j).norm(); }

AxisPair axes_from_params(const AxisParams& x) {
  return {spherical_to_axis(x.theta1, x.phi1), spherical_to_axis(x.theta2, x.phi2)};
}

AxisParams params_from_axes(const AxisPair& axes) {
  const auto a = axis_to_spherical(axes.j1);
  const auto b = axis_to_spherical(axes.j2);
  return {a.theta, a.phi, b.theta, b.phi};
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

namespace {

void wrap_pair(double& theta, double& phi) {
  theta = wrap_angle(theta);
  if (theta > kPi / 2) {
    theta = kPi - theta;
    phi += kPi;
  } else if (theta < -kPi / 2) {
    theta = -kPi - theta;
    phi += kPi;
  }
  phi = wrap_angle(phi);
}

}  // namespace

AxisParams wrap_params(const AxisParams& x) {
  AxisParams w = x;
  wrap_pair(w.theta1, w.phi1);
  wrap_pair(w.theta2, w.phi2);
  return w;
}

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const double c = a.dot(b);
  if (c < -1.0 + 1e-12) {
    // Antiparallel: half turn about any axis perpendicular to `a`.
    Vec3 perp = a.cross(Vec3::UnitX());
    if (perp.norm() < 1e-6) perp = a.cross(Vec3::UnitY());
    return axis_angle_rotation(perp, kPi);
  }
  return Eigen::Quaterniond::FromTwoVectors(a, b).toRotationMatrix();
}

}  // namespace jointaxis
