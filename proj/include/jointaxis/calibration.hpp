// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jointaxis/kinematics.hpp"
#include "jointaxis/recording.hpp"
#include "jointaxis/residuals.hpp"

namespace jointaxis {

inline constexpr double kStandardGravity = 9.81;

/// Stationarity thresholds applied to calibration segments.
inline constexpr double kMaxStationaryGyroStd = 0.05;  // rad/s, per axis
inline constexpr double kMaxStationaryAccNormStd = 0.5;  // m/s^2

/// Lower bound applied to estimated noise deviations.
inline constexpr double kSigmaFloor = 1e-9;

struct SensorCalibration {
  Vec3 gyro_bias = Vec3::Zero();
  double acc_gain = 1.0;
  double sigma_gyro = 1.0;  // worst axis of this sensor, rad/s
  double sigma_acc = 1.0;   // worst axis of this sensor, m/s^2

  void validate() const;
};

/// Component-wise mean. Rejects data whose per-axis sample std exceeds
/// `max_std` (pass std::nullopt to skip the check).
Vec3 estimate_gyro_bias(std::span<const Vec3> stationary,
                        std::optional<double> max_std = kMaxStationaryGyroStd);

/// Least-squares gain g * sum‖a‖ / sum‖a‖^2 matching the mean norm to g.
/// Rejects samples shorter than 0.1 g and, when `max_norm_std` is set,
/// data whose norm spread exceeds it.
double estimate_acc_gain(std::span<const Vec3> stationary, double g = kStandardGravity,
                         std::optional<double> max_norm_std = std::nullopt);

/// sqrt of the largest per-axis sample variance over all given streams.
double max_axis_std(std::span<const std::span<const Vec3>> streams);

struct NoiseEstimate {
  NoiseModel noise;
  std::vector<std::string> warnings;
};

/// Worst-case deviations per sensor type over both sensors (6 axes each).
/// Needs >= 30 samples per stream. Zero variance is floored at kSigmaFloor.
NoiseEstimate estimate_noise_std(std::span<const Vec3> gyr1, std::span<const Vec3> gyr2,
                                 std::span<const Vec3> acc1, std::span<const Vec3> acc2);

/// gyro - bias and gain * acc, per sensor.
RecordingPair apply_calibration(const RecordingPair& recording, const SensorCalibration& cal1,
                                const SensorCalibration& cal2);

struct PairCalibration {
  SensorCalibration sensor1;
  SensorCalibration sensor2;
  NoiseModel noise;  // worst case across both sensors
  std::vector<std::string> warnings;

  double w0() const;
};

/// Full calibration of both sensors from a stationary segment, with
/// stationarity checks on gyro std and accelerometer norm spread.
PairCalibration calibrate_pair(std::span<const SamplePair> stationary,
                               double g = kStandardGravity);

}  // namespace jointaxis
