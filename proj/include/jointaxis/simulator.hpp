// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jointaxis/kinematics.hpp"
#include "jointaxis/recording.hpp"
#include "jointaxis/residuals.hpp"

namespace jointaxis {

enum class AxisMode { free, vertical, horizontal };
enum class SpeedProfileKind { fast, slow, mixed };

std::string_view to_string(AxisMode mode);
std::string_view to_string(SpeedProfileKind kind);
AxisMode parse_axis_mode(std::string_view s);
SpeedProfileKind parse_speed_profile(std::string_view s);

/// A two-segment hinge mechanism with one IMU on each segment.
///
/// r1 and r2 locate each sensor relative to the joint center, expressed in
/// that sensor's frame, so that a sensor's specific force is
/// R_i^T (p0_ddot - gravity) + K(w_i, w_i_dot) r_i.
struct HingeScenario {
  Vec3 j1_true = Vec3(0.2, -0.6, 0.7746).normalized();
  Vec3 j2_true = Vec3(-0.5, 0.1, -0.86).normalized();
  double mount_twist1 = 0.7;   // rad, sensor rotation about the joint axis
  double mount_twist2 = -1.1;  // rad
  Vec3 r1 = Vec3(0.1, 0.05, -0.02);
  Vec3 r2 = Vec3(-0.08, 0.03, 0.04);
  AxisMode axis_mode = AxisMode::free;
  SpeedProfileKind speed_profile = SpeedProfileKind::fast;
  double duration = 60.0;             // s of motion
  double stationary_duration = 0.0;   // s of rest prepended to the motion
  double sample_rate = 100.0;         // Hz
  double translation_amplitude = 0.3; // m/s, peak joint-center speed per axis
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  std::optional<NoiseModel> noise;    // nullopt for noise-free output
  Vec3 gyro_bias1 = Vec3::Zero();
  Vec3 gyro_bias2 = Vec3::Zero();
  double acc_scale1 = 1.0;  // multiplicative accelerometer scale error
  double acc_scale2 = 1.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError on non-unit axes or non-positive rate/duration.
  void validate() const;
};

/// Angle with its first two time derivatives.
struct AngleState {
  double value = 0.0;
  double rate = 0.0;
  double accel = 0.0;
};

/// Monotone time reparametrization tau(t) whose rate switches between
/// levels with C2 quintic blends. Motion functions are written in tau.
class TimeWarp {
 public:
  struct Knot {
    double t;      // start of the transition into `level`
    double level;  // dtau/dt after the transition
  };

  TimeWarp(double initial_level, std::vector<Knot> knots, double blend_width);

  AngleState at(double t) const;  // value = tau, rate = dtau/dt, accel = d2tau/dt2

 private:
  double initial_level_;
  std::vector<Knot> knots_;
  std::vector<double> tau_at_knot_;
  double blend_width_;
};

/// Sum of sinusoids in tau, parametrized by rate amplitudes so that
/// d/dtau = sum c_k sin(2 pi f_k tau + p_k) and value(0) = 0.
struct SinusoidSum {
  struct Term {
    double rate_amplitude;
    double frequency;  // Hz in tau
    double phase;
  };
  std::vector<Term> terms;

  AngleState at(double tau) const;
  double peak_rate() const;  // sum of rate amplitudes
};

/// Joint flexion profile: a fixed sinusoid shape played through a time warp.
class SpeedProfile {
 public:
  SpeedProfile(SpeedProfileKind kind, std::uint64_t seed, double stationary_duration = 0.0);

  SpeedProfileKind kind() const noexcept { return kind_; }
  const TimeWarp& warp() const noexcept { return warp_; }

  /// Joint angle at time t (rad), with rate and acceleration.
  AngleState angle(double t) const;

  /// Maps a tau-domain signal to the time domain through the warp.
  AngleState warped(const SinusoidSum& signal, double t) const;

  /// Interval boundaries of the mixed profile (empty for fast/slow).
  const std::vector<TimeWarp::Knot>& regime_knots() const noexcept { return knots_; }

 private:
  SpeedProfileKind kind_;
  std::vector<TimeWarp::Knot> knots_;
  TimeWarp warp_;
  SinusoidSum shape_;
};

/// Speed ratio of the slow regime to the fast one.
inline constexpr double kSlowSpeedRatio = 0.6 / 4.1;

/// Joint angle of `profile` at time t.
AngleState speed_profile_angle(const SpeedProfile& profile, double t);

/// Full kinematic state of both segments at one instant.
struct HingeState {
  Mat3 R1;  // sensor 1 to global
  Mat3 R2;
  Vec3 omega1;  // sensor frame, rad/s
  Vec3 omega_dot1;
  Vec3 omega2;
  Vec3 omega_dot2;
  Vec3 joint_acc;  // global acceleration of the joint center
  double joint_angle = 0.0;
};

/// Analytic motion of the mechanism described by a scenario.
class HingeMotion {
 public:
  explicit HingeMotion(const HingeScenario& scenario);

  HingeState state(double t) const;

  /// Sensor orientations only.
  std::pair<Mat3, Mat3> orientations(double t) const;

  const SpeedProfile& profile() const noexcept { return profile_; }
  const Mat3& mount1() const noexcept { return mount1_; }
  const Mat3& mount2() const noexcept { return mount2_; }

 private:
  HingeScenario scenario_;
  SpeedProfile profile_;
  Mat3 mount1_;  // sensor 1 frame to segment 1 frame
  Mat3 mount2_;
  Mat3 base_;    // fixed part of the segment 1 orientation
  SinusoidSum yaw_, pitch_, roll_;
  SinusoidSum trans_[3];
};

/// Ground-truth record of a simulated run.
struct GroundTruth {
  HingeScenario scenario;
  std::vector<double> t;
  std::vector<Mat3> R1, R2;
  std::vector<double> joint_angle;
  std::vector<Vec3> omega1, omega_dot1, omega2, omega_dot2;  // noise-free, sensor frames
};

struct Simulation {
  RecordingPair recording;
  GroundTruth truth;
};

/// Samples the scenario at sample_rate over stationary_duration + duration.
Simulation simulate(const HingeScenario& scenario);

struct RateStats {
  double max = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

/// Statistics of the gyroscope norm over both sensors.
RateStats gyro_rate_stats(const RecordingPair& recording);

}  // namespace jointaxis
