// SPDX-License-Identifier: Apache-2.0

#include "jointaxis/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "jointaxis/errors.hpp"

namespace jointaxis {

namespace {

constexpr std::size_t kMinNoiseSamples = 30;

Vec3 mean_of(std::span<const Vec3> v) {
  Vec3 m = Vec3::Zero();
  for (const Vec3& x : v) m += x;
  return m / static_cast<double>(v.size());
}

// Per-axis unbiased sample variance.
Vec3 variance_of(std::span<const Vec3> v) {
  const Vec3 m = mean_of(v);
  Vec3 acc = Vec3::Zero();
  for (const Vec3& x : v) acc += (x - m).cwiseAbs2();
  return acc / static_cast<double>(v.size() - 1);
}

double std_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

const char* axis_name(int i) { return i == 0 ? "x" : (i == 1 ? "y" : "z"); }

std::vector<Vec3> column(std::span<const SamplePair> s, Vec3 SamplePair::*field) {
  std::vector<Vec3> out;
  out.reserve(s.size());
  for (const SamplePair& p : s) out.push_back(p.*field);
  return out;
}

}  // namespace

void SensorCalibration::validate() const {
  if (!gyro_bias.allFinite()) throw ConfigError("gyro bias must be finite");
  if (!(acc_gain > 0.0) || !std::isfinite(acc_gain)) throw ConfigError("acc gain must be > 0");
  if (!(sigma_gyro > 0.0) || !(sigma_acc > 0.0)) throw ConfigError("sigmas must be > 0");
}

Vec3 estimate_gyro_bias(std::span<const Vec3> stationary, std::optional<double> max_std) {
  if (stationary.size() < 2) throw ArgumentError("estimate_gyro_bias: need at least 2 samples");
  if (max_std) {
    const Vec3 sd = variance_of(stationary).cwiseSqrt();
    for (int i = 0; i < 3; ++i) {
      if (sd[i] > *max_std) throw NotStationaryError(std::string("gyro_") + axis_name(i), sd[i], *max_std);
    }
  }
  return mean_of(stationary);
}

double estimate_acc_gain(std::span<const Vec3> stationary, double g,
                         std::optional<double> max_norm_std) {
  if (stationary.size() < 2) throw ArgumentError("estimate_acc_gain: need at least 2 samples");
  if (!(g > 0.0)) throw ArgumentError("estimate_acc_gain: gravity must be positive");
  std::vector<double> norms;
  norms.reserve(stationary.size());
  double sum = 0.0, sum_sq = 0.0;
  for (const Vec3& a : stationary) {
    const double n = a.norm();
    if (!(n >= 0.1 * g)) {
      throw ArgumentError("estimate_acc_gain: implausible stationary sample with norm " +
                          std::to_string(n));
    }
    norms.push_back(n);
    sum += n;
    sum_sq += n * n;
  }
  if (max_norm_std) {
    const double sd = std_of(norms);
    if (sd > *max_norm_std) throw NotStationaryError("acc_norm", sd, *max_norm_std);
  }
  return g * sum / sum_sq;
}

double max_axis_std(std::span<const std::span<const Vec3>> streams) {
  double worst = 0.0;
  for (const auto& s : streams) {
    if (s.size() < 2) throw ArgumentError("max_axis_std: need at least 2 samples per stream");
    worst = std::max(worst, variance_of(s).maxCoeff());
  }
  return std::sqrt(worst);
}

NoiseEstimate estimate_noise_std(std::span<const Vec3> gyr1, std::span<const Vec3> gyr2,
                                 std::span<const Vec3> acc1, std::span<const Vec3> acc2) {
  for (auto n : {gyr1.size(), gyr2.size(), acc1.size(), acc2.size()}) {
    if (n < kMinNoiseSamples) {
      throw ArgumentError("estimate_noise_std: need at least 30 samples per stream, got " +
                          std::to_string(n));
    }
  }
  const std::span<const Vec3> gyros[] = {gyr1, gyr2};
  const std::span<const Vec3> accs[] = {acc1, acc2};
  NoiseEstimate out;
  out.noise.sigma_gyro = max_axis_std(gyros);
  out.noise.sigma_acc = max_axis_std(accs);
  if (out.noise.sigma_gyro < kSigmaFloor) {
    out.noise.sigma_gyro = kSigmaFloor;
    out.warnings.emplace_back("gyroscope noise is zero; sigma_gyro floored at 1e-9");
  }
  if (out.noise.sigma_acc < kSigmaFloor) {
    out.noise.sigma_acc = kSigmaFloor;
    out.warnings.emplace_back("accelerometer noise is zero; sigma_acc floored at 1e-9");
  }
  return out;
}

RecordingPair apply_calibration(const RecordingPair& recording, const SensorCalibration& cal1,
                                const SensorCalibration& cal2) {
  cal1.validate();
  cal2.validate();
  RecordingPair out = recording;
  for (SamplePair& s : out.samples) {
    s.gyr1 -= cal1.gyro_bias;
    s.gyr2 -= cal2.gyro_bias;
    s.acc1 *= cal1.acc_gain;
    s.acc2 *= cal2.acc_gain;
  }
  return out;
}

double PairCalibration::w0() const { return base_weight(noise); }

PairCalibration calibrate_pair(std::span<const SamplePair> stationary, double g) {
  const auto gyr1 = column(stationary, &SamplePair::gyr1);
  const auto gyr2 = column(stationary, &SamplePair::gyr2);
  auto acc1 = column(stationary, &SamplePair::acc1);
  auto acc2 = column(stationary, &SamplePair::acc2);

  PairCalibration out;
  auto calibrate_one = [g](const std::vector<Vec3>& gyr, std::vector<Vec3>& acc,
                           const char* name) {
    SensorCalibration cal;
    try {
      cal.gyro_bias = estimate_gyro_bias(gyr);
      cal.acc_gain = estimate_acc_gain(acc, g, kMaxStationaryAccNormStd);
    } catch (const NotStationaryError& e) {
      throw NotStationaryError(std::string(name) + "." + e.axis(), e.observed(), e.limit());
    }
    for (Vec3& a : acc) a *= cal.acc_gain;
    const std::span<const Vec3> gs[] = {gyr};
    const std::span<const Vec3> as[] = {acc};
    cal.sigma_gyro = std::max(max_axis_std(gs), kSigmaFloor);
    cal.sigma_acc = std::max(max_axis_std(as), kSigmaFloor);
    return cal;
  };
  out.sensor1 = calibrate_one(gyr1, acc1, "sensor1");
  out.sensor2 = calibrate_one(gyr2, acc2, "sensor2");

  NoiseEstimate noise = estimate_noise_std(gyr1, gyr2, acc1, acc2);
  out.noise = noise.noise;
  out.warnings = std::move(noise.warnings);
  return out;
}

}  // namespace jointaxis
