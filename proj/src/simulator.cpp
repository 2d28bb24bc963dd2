// SPDX-License-Identifier: Apache-2.0

#include "jointaxis/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "jointaxis/errors.hpp"
#include "jointaxis/solver.hpp"

namespace jointaxis {

namespace {

constexpr double kRegimeBlend = 1.0;  // s, width of speed-regime transitions
constexpr double kMixedMin = 5.0;     // s
constexpr double kMixedMax = 10.0;    // s
constexpr double kMixedHorizon = 3600.0;

// Seed streams derived from the scenario seed.
constexpr std::uint64_t kPhaseStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kRegimeStream = 3;
constexpr std::uint64_t kSegmentStream = 4;

double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Quintic smoothstep, its derivative and its integral from 0.
double smooth(double u) { return u * u * u * (u * (6.0 * u - 15.0) + 10.0); }
double smooth_d(double u) { return 30.0 * u * u * (u - 1.0) * (u - 1.0); }
double smooth_int(double u) { return u * u * u * u * (u * (u - 3.0) + 2.5); }

SinusoidSum make_signal(std::initializer_list<std::pair<double, double>> rate_freq,
                        std::mt19937_64& gen, double scale = 1.0) {
  SinusoidSum s;
  for (const auto& [c, f] : rate_freq) {
    s.terms.push_back({scale * c, f, 2.0 * kPi * unit_uniform(gen)});
  }
  return s;
}

// Accumulates a chain of rotations R = F1 F2 ... together with the body
// angular velocity and its derivative.
struct RotationChain {
  Mat3 R = Mat3::Identity();
  Vec3 omega = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();

  void fixed(const Mat3& c) {
    R = R * c;
    omega = c.transpose() * omega;
    omega_dot = c.transpose() * omega_dot;
  }

  void rotate(const Vec3& axis, const AngleState& q) {
    const Mat3 e = axis_angle_rotation(axis, q.value);
    R = R * e;
    const Vec3 w = e.transpose() * omega;
    omega_dot = e.transpose() * omega_dot - q.rate * axis.cross(w) + axis * q.accel;
    omega = w + axis * q.rate;
  }
};

}  // namespace

std::string_view to_string(AxisMode mode) {
  switch (mode) {
    case AxisMode::free: return "free";
    case AxisMode::vertical: return "vertical";
    case AxisMode::horizontal: return "horizontal";
  }
  return "free";
}

std::string_view to_string(SpeedProfileKind kind) {
  switch (kind) {
    case SpeedProfileKind::fast: return "fast";
    case SpeedProfileKind::slow: return "slow";
    case SpeedProfileKind::mixed: return "mixed";
  }
  return "fast";
}

AxisMode parse_axis_mode(std::string_view s) {
  if (s == "free") return AxisMode::free;
  if (s == "vertical") return AxisMode::vertical;
  if (s == "horizontal") return AxisMode::horizontal;
  throw ConfigError("unknown axis mode '" + std::string(s) + "'");
}

SpeedProfileKind parse_speed_profile(std::string_view s) {
  if (s == "fast") return SpeedProfileKind::fast;
  if (s == "slow") return SpeedProfileKind::slow;
  if (s == "mixed") return SpeedProfileKind::mixed;
  throw ConfigError("unknown speed profile '" + std::string(s) + "'");
}

void HingeScenario::validate() const {
  for (const Vec3* j : {&j1_true, &j2_true}) {
    if (!j->allFinite() || std::abs(j->norm() - 1.0) > 1e-9) {
      throw ConfigError("scenario joint axes must be unit vectors");
    }
  }
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ConfigError("sample_rate must be positive");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (!(stationary_duration >= 0.0)) throw ConfigError("stationary_duration must be >= 0");
  if (!(translation_amplitude >= 0.0)) throw ConfigError("translation_amplitude must be >= 0");
  if (!(acc_scale1 > 0.0) || !(acc_scale2 > 0.0)) throw ConfigError("acc scales must be positive");
  if (!r1.allFinite() || !r2.allFinite() || !gravity.allFinite() || !gyro_bias1.allFinite() ||
      !gyro_bias2.allFinite() || !std::isfinite(mount_twist1) || !std::isfinite(mount_twist2)) {
    throw ConfigError("scenario vectors must be finite");
  }
  if (noise) noise->validate();
}

// ---------------------------------------------------------------- TimeWarp

TimeWarp::TimeWarp(double initial_level, std::vector<Knot> knots, double blend_width)
    : initial_level_(initial_level), knots_(std::move(knots)), blend_width_(blend_width) {
  tau_at_knot_.reserve(knots_.size());
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    if (k == 0) {
      tau_at_knot_.push_back(initial_level_ * knots_[0].t);
      continue;
    }
    const double gap = knots_[k].t - knots_[k - 1].t;
    if (gap < blend_width_) throw ArgumentError("TimeWarp: knots closer than the blend width");
    const double before = k > 1 ? knots_[k - 2].level : initial_level_;
    const double after = knots_[k - 1].level;
    tau_at_knot_.push_back(tau_at_knot_.back() + blend_width_ * 0.5 * (before + after) +
                           after * (gap - blend_width_));
  }
}

AngleState TimeWarp::at(double t) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double v, const Knot& k) { return v < k.t; });
  if (it == knots_.begin()) return {initial_level_ * t, initial_level_, 0.0};
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double before = k > 0 ? knots_[k - 1].level : initial_level_;
  const double after = knots_[k].level;
  const double dt = t - knots_[k].t;
  const double w = blend_width_;
  if (dt < w) {
    const double u = dt / w;
    return {tau_at_knot_[k] + w * (before * u + (after - before) * smooth_int(u)),
            before + (after - before) * smooth(u), (after - before) * smooth_d(u) / w};
  }
  return {tau_at_knot_[k] + w * 0.5 * (before + after) + after * (dt - w), after, 0.0};
}

// ------------------------------------------------------------- SinusoidSum

AngleState SinusoidSum::at(double tau) const {
  AngleState s;
  for (const Term& term : terms) {
    const double omega = 2.0 * kPi * term.frequency;
    const double arg = omega * tau + term.phase;
    s.value += term.rate_amplitude / omega * (std::cos(term.phase) - std::cos(arg));
    s.rate += term.rate_amplitude * std::sin(arg);
    s.accel += term.rate_amplitude * omega * std::cos(arg);
  }
  return s;
}

double SinusoidSum::peak_rate() const {
  double p = 0.0;
  for (const Term& term : terms) p += std::abs(term.rate_amplitude);
  return p;
}

// ------------------------------------------------------------ SpeedProfile

namespace {

std::vector<TimeWarp::Knot> make_regime_knots(SpeedProfileKind kind, std::uint64_t seed,
                                         double stationary) {
  std::vector<TimeWarp::Knot> knots;
  const double first = kind == SpeedProfileKind::slow ? kSlowSpeedRatio : 1.0;
  if (stationary > 0.0) knots.push_back({stationary, first});
  if (kind != SpeedProfileKind::mixed) return knots;

  std::mt19937_64 gen(derive_seed(seed, kRegimeStream));
  double t = stationary;
  bool fast = true;
  while (t < stationary + kMixedHorizon) {
    t += kMixedMin + (kMixedMax - kMixedMin) * unit_uniform(gen);
    fast = !fast;
    knots.push_back({t, fast ? 1.0 : kSlowSpeedRatio});
  }
  return knots;
}

double initial_level(SpeedProfileKind kind, double stationary) {
  if (stationary > 0.0) return 0.0;
  return kind == SpeedProfileKind::slow ? kSlowSpeedRatio : 1.0;
}

}  // namespace

SpeedProfile::SpeedProfile(SpeedProfileKind kind, std::uint64_t seed, double stationary_duration)
    : kind_(kind),
      knots_(make_regime_knots(kind, seed, stationary_duration)),
      warp_(initial_level(kind, stationary_duration), knots_, kRegimeBlend) {
  std::mt19937_64 gen(derive_seed(seed, kPhaseStream));
  shape_ = make_signal({{2.0, 0.5}, {1.3, 0.83}, {0.8, 1.31}}, gen);
}

AngleState SpeedProfile::warped(const SinusoidSum& signal, double t) const {
  const AngleState w = warp_.at(t);
  const AngleState s = signal.at(w.value);
  return {s.value, s.rate * w.rate, s.accel * w.rate * w.rate + s.rate * w.accel};
}

AngleState SpeedProfile::angle(double t) const { return warped(shape_, t); }

AngleState speed_profile_angle(const SpeedProfile& profile, double t) { return profile.angle(t); }

// ------------------------------------------------------------- HingeMotion

HingeMotion::HingeMotion(const HingeScenario& scenario)
    : scenario_(scenario),
      profile_(scenario.speed_profile, scenario.seed, scenario.stationary_duration) {
  scenario_.validate();
  mount1_ = axis_angle_rotation(Vec3::UnitZ(), scenario.mount_twist1) *
            rotation_between(scenario.j1_true, Vec3::UnitZ());
  mount2_ = axis_angle_rotation(Vec3::UnitZ(), scenario.mount_twist2) *
            rotation_between(scenario.j2_true, Vec3::UnitZ());

  std::mt19937_64 gen(derive_seed(scenario.seed, kSegmentStream));
  switch (scenario.axis_mode) {
    case AxisMode::free:
      base_ = Mat3::Identity();
      yaw_ = make_signal({{0.9, 0.23}, {0.5, 0.61}}, gen);
      pitch_ = make_signal({{0.7, 0.37}, {0.4, 0.71}}, gen);
      roll_ = make_signal({{0.6, 0.29}, {0.5, 0.53}}, gen);
      break;
    case AxisMode::vertical:
      base_ = Mat3::Identity();
      yaw_ = make_signal({{1.0, 0.21}, {0.6, 0.47}}, gen);
      break;
    case AxisMode::horizontal:
      base_ = axis_angle_rotation(Vec3::UnitZ(), 0.4) * axis_angle_rotation(Vec3::UnitX(), kPi / 2);
      yaw_ = make_signal({{1.0, 0.21}, {0.6, 0.47}}, gen);
      break;
  }
  const double a = scenario.translation_amplitude;
  trans_[0] = make_signal({{0.7, 0.40}, {0.3, 0.90}}, gen, a);
  trans_[1] = make_signal({{0.7, 0.33}, {0.3, 0.77}}, gen, a);
  trans_[2] = make_signal({{0.7, 0.45}, {0.3, 0.85}}, gen, a);
}

HingeState HingeMotion::state(double t) const {
  RotationChain seg1;
  seg1.fixed(base_);
  seg1.rotate(Vec3::UnitZ(), profile_.warped(yaw_, t));
  if (scenario_.axis_mode == AxisMode::free) {
    seg1.rotate(Vec3::UnitY(), profile_.warped(pitch_, t));
    seg1.rotate(Vec3::UnitX(), profile_.warped(roll_, t));
  }

  const AngleState q = profile_.angle(t);
  RotationChain seg2 = seg1;
  seg2.rotate(Vec3::UnitZ(), q);

  RotationChain s1 = seg1;
  s1.fixed(mount1_);
  RotationChain s2 = seg2;
  s2.fixed(mount2_);

  Vec3 p_acc;
  for (int i = 0; i < 3; ++i) p_acc[i] = profile_.warped(trans_[i], t).accel;
  if (scenario_.axis_mode != AxisMode::free) {
    // Planar modes: the joint center moves in the plane normal to the axis.
    const Vec3 u = base_ * Vec3::UnitZ();
    p_acc -= u * u.dot(p_acc);
  }

  HingeState out;
  out.R1 = s1.R;
  out.R2 = s2.R;
  out.omega1 = s1.omega;
  out.omega_dot1 = s1.omega_dot;
  out.omega2 = s2.omega;
  out.omega_dot2 = s2.omega_dot;
  out.joint_acc = p_acc;
  out.joint_angle = q.value;
  return out;
}

std::pair<Mat3, Mat3> HingeMotion::orientations(double t) const {
  const HingeState s = state(t);
  return {s.R1, s.R2};
}

// ---------------------------------------------------------------- simulate

Simulation simulate(const HingeScenario& scenario) {
  scenario.validate();
  const HingeMotion motion(scenario);
  const double total = scenario.stationary_duration + scenario.duration;
  const auto n = static_cast<std::size_t>(std::floor(total * scenario.sample_rate + 0.5));

  std::mt19937_64 gen(derive_seed(scenario.seed, kNoiseStream));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto noise_vec = [&](double sigma) {
    if (!scenario.noise) return Vec3(Vec3::Zero());
    const double x = normal(gen), y = normal(gen), z = normal(gen);
    return Vec3(sigma * x, sigma * y, sigma * z);
  };
  const double sg = scenario.noise ? scenario.noise->sigma_gyro : 0.0;
  const double sa = scenario.noise ? scenario.noise->sigma_acc : 0.0;

  Simulation sim;
  sim.recording.sample_rate = scenario.sample_rate;
  sim.recording.metadata = {{"source", "simulator"},
                            {"axis_mode", std::string(to_string(scenario.axis_mode))},
                            {"speed_profile", std::string(to_string(scenario.speed_profile))},
                            {"seed", std::to_string(scenario.seed)}};
  sim.recording.samples.reserve(n);
  GroundTruth& gt = sim.truth;
  gt.scenario = scenario;

  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / scenario.sample_rate;
    const HingeState st = motion.state(t);
    const Vec3 specific = st.joint_acc - scenario.gravity;

    SamplePair s;
    s.t = t;
    s.gyr1 = st.omega1 + scenario.gyro_bias1 + noise_vec(sg);
    s.acc1 = scenario.acc_scale1 *
                 (st.R1.transpose() * specific +
                  rotational_acc_matrix(st.omega1, st.omega_dot1) * scenario.r1) +
             noise_vec(sa);
    s.gyr2 = st.omega2 + scenario.gyro_bias2 + noise_vec(sg);
    s.acc2 = scenario.acc_scale2 *
                 (st.R2.transpose() * specific +
                  rotational_acc_matrix(st.omega2, st.omega_dot2) * scenario.r2) +
             noise_vec(sa);
    sim.recording.samples.push_back(s);

    gt.t.push_back(t);
    gt.R1.push_back(st.R1);
    gt.R2.push_back(st.R2);
    gt.joint_angle.push_back(st.joint_angle);
    gt.omega1.push_back(st.omega1);
    gt.omega_dot1.push_back(st.omega_dot1);
    gt.omega2.push_back(st.omega2);
    gt.omega_dot2.push_back(st.omega_dot2);
  }
  return sim;
}

RateStats gyro_rate_stats(const RecordingPair& recording) {
  RateStats out;
  std::vector<double> norms;
  norms.reserve(2 * recording.size());
  for (const SamplePair& s : recording.samples) {
    norms.push_back(s.gyr1.norm());
    norms.push_back(s.gyr2.norm());
  }
  if (norms.empty()) return out;
  double sum = 0.0;
  for (double v : norms) {
    out.max = std::max(out.max, v);
    sum += v;
  }
  out.mean = sum / static_cast<double>(norms.size());
  double var = 0.0;
  for (double v : norms) var += (v - out.mean) * (v - out.mean);
  out.sd = norms.size() > 1 ? std::sqrt(var / static_cast<double>(norms.size() - 1)) : 0.0;
  return out;
}

}  // namespace jointaxis
