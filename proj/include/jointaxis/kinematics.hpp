// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace jointaxis {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

bool is_finite(const Vec3& v);

/// Spherical parameters of the two joint axis coordinates, radians.
/// theta is the elevation above the sensor x-y plane, phi the azimuth.
struct AxisParams {
  double theta1 = 0.0;
  double phi1 = 0.0;
  double theta2 = 0.0;
  double phi2 = 0.0;

  Eigen::Vector4d as_vector() const { return {theta1, phi1, theta2, phi2}; }
  static AxisParams from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
};

/// The joint axis expressed in the frame of sensor 1 and of sensor 2.
struct AxisPair {
  Vec3 j1 = Vec3::UnitX();
  Vec3 j2 = Vec3::UnitX();
};

/// K(w, w_dot) such that K * r == w x (w x r) + w_dot x r.
Mat3 rotational_acc_matrix(const Vec3& omega, const Vec3& omega_dot);

/// (cos t cos p, cos t sin p, sin t).
Vec3 spherical_to_axis(double theta, double phi);

/// 3x2 Jacobian of spherical_to_axis; columns are d/dtheta and d/dphi.
Eigen::Matrix<double, 3, 2> spherical_axis_jacobian(double theta, double phi);

struct SphericalAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Inverse of spherical_to_axis. theta in [-pi/2, pi/2], phi in (-pi, pi],
/// phi = 0 at the poles. Throws NormViolation unless |‖j‖ - 1| <= 1e-6.
SphericalAngles axis_to_spherical(const Vec3& j);

/// ‖omega x j‖, the rate component perpendicular to the unit axis j.
double perp_angular_speed(const Vec3& omega, const Vec3& j);

AxisPair axes_from_params(const AxisParams& x);
AxisParams params_from_axes(const AxisPair& axes);

/// Brings theta into [-pi/2, pi/2] (shifting phi by pi when reflected) and
/// phi into (-pi, pi]. The described axes are unchanged.
AxisParams wrap_params(const AxisParams& x);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Cross-product matrix, skew(a) * b == a x b.
Mat3 skew(const Vec3& a);

/// Inverse of skew() for the skew-symmetric part of m.
Vec3 vee(const Mat3& m);

/// Rotation by `angle` about the unit `axis`.
Mat3 axis_angle_rotation(const Vec3& axis, double angle);

/// Shortest rotation taking unit vector `from` onto unit vector `to`.
Mat3 rotation_between(const Vec3& from, const Vec3& to);

}  // namespace jointaxis
