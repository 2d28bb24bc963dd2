#include <cmath>
#include <vector>

#include "doctest.h"
#include "jointaxis/errors.hpp"
#include "jointaxis/simulator.hpp"

using namespace jointaxis;

namespace {

HingeScenario scenario(AxisMode mode, SpeedProfileKind speed, double duration = 20.0) {
  HingeScenario sc;
  sc.axis_mode = mode;
  sc.speed_profile = speed;
  sc.duration = duration;
  return sc;
}

double max_abs_rate(const SpeedProfile& p, double t_end, double dt = 1e-3) {
  double m = 0.0;
  for (double t = 0.0; t <= t_end; t += dt) m = std::max(m, std::abs(p.angle(t).rate));
  return m;
}

// Body rate of R(t) from a five-point stencil.
Vec3 body_rate(const HingeMotion& motion, double t, double h, bool second) {
  auto R = [&](double s) {
    auto o = motion.orientations(s);
    return second ? o.second : o.first;
  };
  Mat3 dR = (R(t - 2 * h) - 8 * R(t - h) + 8 * R(t + h) - R(t + 2 * h)) / (12 * h);
  return vee(R(t).transpose() * dR);
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("fixed-axis rotation satisfies both constraints exactly") {
  auto sc = scenario(AxisMode::vertical, SpeedProfileKind::fast);
  sc.translation_amplitude = 0.0;
  auto sim = simulate(sc);
  AxisParams truth = params_from_axes({sc.j1_true, sc.j2_true});
  double worst_g = 0.0, worst_a = 0.0;
  for (const auto& s : sim.recording.samples) {
    worst_g = std::max(worst_g, std::abs(gyro_residual(s, truth, 1.0)));
    worst_a = std::max(worst_a, std::abs(acc_residual(s, truth, 1.0)));
  }
  CHECK(worst_g < 1e-10);
  CHECK(worst_a < 1e-10);
}

TEST_CASE("free motion: accelerometer residual is exactly the lever-arm term") {
  for (auto speed : {SpeedProfileKind::fast, SpeedProfileKind::slow, SpeedProfileKind::mixed}) {
    auto sc = scenario(AxisMode::free, speed);
    auto sim = simulate(sc);
    const auto& gt = sim.truth;
    AxisParams truth = params_from_axes({sc.j1_true, sc.j2_true});
    double worst_g = 0.0, worst_a = 0.0, largest = 0.0;
    for (std::size_t k = 0; k < sim.recording.size(); ++k) {
      const auto& s = sim.recording.samples[k];
      double lever = sc.j1_true.dot(rotational_acc_matrix(gt.omega1[k], gt.omega_dot1[k]) * sc.r1) -
                     sc.j2_true.dot(rotational_acc_matrix(gt.omega2[k], gt.omega_dot2[k]) * sc.r2);
      worst_g = std::max(worst_g, std::abs(gyro_residual(s, truth, 1.0)));
      worst_a = std::max(worst_a, std::abs(acc_residual(s, truth, 1.0) - lever));
      largest = std::max(largest, std::abs(lever));
    }
    CHECK(worst_g < 1e-10);
    CHECK(worst_a < 1e-10);
    // the term is genuinely present in free motion
    if (speed != SpeedProfileKind::slow) CHECK(largest > 0.1);
  }
}

TEST_CASE("all scenarios keep the gyro constraint and the axis coincidence") {
  for (auto mode : {AxisMode::free, AxisMode::vertical, AxisMode::horizontal})
    for (auto speed : {SpeedProfileKind::fast, SpeedProfileKind::slow, SpeedProfileKind::mixed}) {
      auto sc = scenario(mode, speed, 15.0);
      auto sim = simulate(sc);
      AxisParams truth = params_from_axes({sc.j1_true, sc.j2_true});
      double gyro = 0.0, coincide = 0.0, ortho = 0.0;
      for (std::size_t k = 0; k < sim.recording.size(); ++k) {
        gyro = std::max(gyro, std::abs(gyro_residual(sim.recording.samples[k], truth, 1.0)));
        const Mat3& R1 = sim.truth.R1[k];
        const Mat3& R2 = sim.truth.R2[k];
        coincide = std::max(coincide, (R1 * sc.j1_true - R2 * sc.j2_true).norm());
        ortho = std::max({ortho, (R1.transpose() * R1 - Mat3::Identity()).norm(),
                          (R2.transpose() * R2 - Mat3::Identity()).norm()});
      }
      CHECK(gyro < 1e-10);
      CHECK(coincide < 1e-10);
      CHECK(ortho < 1e-12);
    }
}

TEST_CASE("planar modes keep the global axis in place") {
  auto v = simulate(scenario(AxisMode::vertical, SpeedProfileKind::mixed));
  for (std::size_t k = 0; k < v.truth.t.size(); ++k)
    CHECK((v.truth.R1[k] * v.truth.scenario.j1_true - Vec3::UnitZ()).norm() < 1e-10);

  auto h = simulate(scenario(AxisMode::horizontal, SpeedProfileKind::fast));
  double worst = 0.0;
  for (std::size_t k = 0; k < h.truth.t.size(); ++k) {
    Vec3 u = h.truth.R1[k] * h.truth.scenario.j1_true;
    worst = std::max(worst, std::abs(rad2deg(std::asin(std::clamp(u.z(), -1.0, 1.0)))));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("zero joint angle and identity base leave only the mounting") {
  auto sc = scenario(AxisMode::vertical, SpeedProfileKind::fast);
  HingeMotion motion(sc);
  auto st = motion.state(0.0);
  CHECK(st.joint_angle == 0.0);
  CHECK((st.R1 - motion.mount1()).norm() < 1e-15);
  CHECK((st.R2 - motion.mount2()).norm() < 1e-15);
  CHECK((motion.mount1() * sc.j1_true - Vec3::UnitZ()).norm() < 1e-12);
  CHECK((motion.mount2() * sc.j2_true - Vec3::UnitZ()).norm() < 1e-12);
}

TEST_CASE("analytic angular rates match finite differences of the orientation") {
  const double h = 1e-3;  // 1 kHz
  for (auto mode : {AxisMode::free, AxisMode::vertical, AxisMode::horizontal})
    for (auto speed : {SpeedProfileKind::fast, SpeedProfileKind::mixed}) {
      HingeMotion motion(scenario(mode, speed, 30.0));
      for (double t = 0.37; t < 30.0; t += 0.61) {
        auto st = motion.state(t);
        Vec3 w1 = body_rate(motion, t, h, false), w2 = body_rate(motion, t, h, true);
        CHECK((w1 - st.omega1).norm() <= 1e-6 * std::max(st.omega1.norm(), 1e-3));
        CHECK((w2 - st.omega2).norm() <= 1e-6 * std::max(st.omega2.norm(), 1e-3));

        auto rate = [&](double s) { return motion.state(s).omega2; };
        Vec3 dw = (rate(t - 2 * h) - 8 * rate(t - h) + 8 * rate(t + h) - rate(t + 2 * h)) / (12 * h);
        CHECK((dw - st.omega_dot2).norm() <= 1e-5 * std::max(st.omega_dot2.norm(), 1.0));
      }
    }
}

TEST_CASE("accelerometer model is specific force plus lever-arm acceleration") {
  auto sc = scenario(AxisMode::free, SpeedProfileKind::fast, 5.0);
  auto sim = simulate(sc);
  HingeMotion motion(sc);
  for (std::size_t k = 0; k < sim.recording.size(); k += 37) {
    const auto& s = sim.recording.samples[k];
    auto st = motion.state(s.t);
    Vec3 f = st.joint_acc - sc.gravity;
    Vec3 a1 = st.R1.transpose() * f + st.omega1.cross(st.omega1.cross(sc.r1)) + st.omega_dot1.cross(sc.r1);
    CHECK((s.acc1 - a1).norm() < 1e-12);
    CHECK((s.gyr1 - st.omega1).norm() == 0.0);
  }
}

TEST_CASE("a resting mechanism reads gravity and bias") {
  HingeScenario sc;
  sc.stationary_duration = 3.0;
  sc.duration = 1.0;
  sc.gyro_bias1 = Vec3(0.01, 0.02, -0.03);
  sc.gyro_bias2 = Vec3(-0.2, 0.0, 0.1);
  auto sim = simulate(sc);
  for (std::size_t k = 0; k < 300; ++k) {
    const auto& s = sim.recording.samples[k];
    CHECK(s.acc1.norm() == doctest::Approx(9.81).epsilon(1e-14));
    CHECK(s.acc2.norm() == doctest::Approx(9.81).epsilon(1e-14));
    CHECK(s.gyr1 == sc.gyro_bias1);
    CHECK(s.gyr2 == sc.gyro_bias2);
  }
  // and moves afterwards
  CHECK(sim.recording.samples.back().gyr2 != sc.gyro_bias2);
}

TEST_CASE("speed profile bands") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    double fast = max_abs_rate(SpeedProfile(SpeedProfileKind::fast, seed), 60.0);
    CHECK(fast >= 3.5);
    CHECK(fast <= 4.5);
    CHECK(max_abs_rate(SpeedProfile(SpeedProfileKind::slow, seed), 60.0) <= 0.7);
    CHECK(max_abs_rate(SpeedProfile(SpeedProfileKind::mixed, seed), 60.0) <= 4.5);
  }
}

TEST_CASE("speed profile starts at zero and is twice differentiable") {
  for (auto kind : {SpeedProfileKind::fast, SpeedProfileKind::slow, SpeedProfileKind::mixed}) {
    SpeedProfile p(kind, 3, kind == SpeedProfileKind::mixed ? 2.0 : 0.0);
    CHECK(p.angle(0.0).value == 0.0);
    const double h = 1e-4;
    double worst_rate = 0.0, worst_acc = 0.0, jump = 0.0;
    AngleState prev = speed_profile_angle(p, 0.0);
    for (double t = 3 * h; t < 40.0; t += 0.0137) {
      AngleState s = p.angle(t);
      CHECK(std::isfinite(s.accel));
      double fd_rate = (p.angle(t + h).value - p.angle(t - h).value) / (2 * h);
      double fd_acc = (p.angle(t + h).rate - p.angle(t - h).rate) / (2 * h);
      worst_rate = std::max(worst_rate, std::abs(fd_rate - s.rate));
      worst_acc = std::max(worst_acc, std::abs(fd_acc - s.accel));
      jump = std::max(jump, std::abs(s.accel - prev.accel));
      prev = s;
    }
    CHECK(worst_rate < 1e-6);
    CHECK(worst_acc < 1e-4);
    // jerk of the shape peaks near sum c (2 pi f)^2 ~ 110 rad/s^3
    CHECK(jump < 110.0 * 0.0137 * 1.2);
  }
}

TEST_CASE("mixed profile alternates on 5 to 10 s intervals") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SpeedProfile p(SpeedProfileKind::mixed, seed);
    const auto& knots = p.regime_knots();
    REQUIRE(knots.size() > 10);
    double prev_t = 0.0, prev_level = 1.0;
    for (const auto& k : knots) {
      CHECK(k.t - prev_t >= 5.0);
      CHECK(k.t - prev_t <= 10.0);
      CHECK(k.level != prev_level);
      prev_t = k.t;
      prev_level = k.level;
    }
  }
  CHECK(SpeedProfile(SpeedProfileKind::fast, 1).regime_knots().empty());
}

TEST_CASE("time warp blends between levels") {
  TimeWarp w(1.0, {{2.0, 0.0}, {5.0, 2.0}}, 1.0);
  CHECK(w.at(1.0).value == doctest::Approx(1.0));
  CHECK(w.at(1.0).rate == 1.0);
  CHECK(w.at(2.5).rate == doctest::Approx(0.5));
  CHECK(w.at(4.0).rate == 0.0);
  CHECK(w.at(4.0).value == doctest::Approx(2.5));
  CHECK(w.at(7.0).rate == 2.0);
  CHECK(w.at(7.0).value == doctest::Approx(2.5 + 0.5 * (0.0 + 2.0) + 2.0 * 1.0));
}

TEST_CASE("noise statistics and reproducibility") {
  HingeScenario sc;
  sc.stationary_duration = 120.0;
  sc.duration = 1.0;
  sc.noise = NoiseModel{};
  auto a = simulate(sc);
  auto b = simulate(sc);
  const std::size_t n = 12000;
  REQUIRE(a.recording.size() >= n);
  for (std::size_t k = 0; k < a.recording.size(); ++k) {
    CHECK(a.recording.samples[k].gyr1 == b.recording.samples[k].gyr1);
    CHECK(a.recording.samples[k].acc2 == b.recording.samples[k].acc2);
  }

  HingeScenario clean = sc;
  clean.noise.reset();
  auto c = simulate(clean);
  Eigen::Array<double, 12, 1> sum = Eigen::Array<double, 12, 1>::Zero(), sum2 = sum;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = a.recording.samples[k];
    const auto& r = c.recording.samples[k];
    Eigen::Array<double, 12, 1> e;
    e << s.gyr1 - r.gyr1, s.gyr2 - r.gyr2, s.acc1 - r.acc1, s.acc2 - r.acc2;
    sum += e;
    sum2 += e * e;
  }
  auto sd = ((sum2 - sum * sum / n) / (n - 1)).sqrt();
  for (int i = 0; i < 6; ++i) CHECK(sd[i] == doctest::Approx(sc.noise->sigma_gyro).epsilon(0.05));
  for (int i = 6; i < 12; ++i) CHECK(sd[i] == doctest::Approx(sc.noise->sigma_acc).epsilon(0.05));

  HingeScenario other = sc;
  other.seed = 2;
  CHECK(simulate(other).recording.samples[5].gyr1 != a.recording.samples[5].gyr1);
}

TEST_CASE("sample count, metadata and rate statistics") {
  auto sc = scenario(AxisMode::free, SpeedProfileKind::fast, 60.0);
  auto sim = simulate(sc);
  CHECK(sim.recording.size() == 6000);
  CHECK(sim.recording.sample_rate == 100.0);
  CHECK(sim.recording.metadata.at("axis_mode") == "free");
  CHECK(sim.recording.metadata.at("speed_profile") == "fast");
  auto st = gyro_rate_stats(sim.recording);
  CHECK(st.max > 3.5);
  CHECK(st.mean > 0.5);
  CHECK(st.sd > 0.3);
}

TEST_CASE("scenario validation and names") {
  HingeScenario sc;
  sc.j1_true = Vec3(1, 1, 0);
  CHECK_THROWS_AS(simulate(sc), ConfigError);
  sc = HingeScenario{};
  sc.sample_rate = 0.0;
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  sc = HingeScenario{};
  sc.duration = -1.0;
  CHECK_THROWS_AS(sc.validate(), ConfigError);

  for (auto m : {AxisMode::free, AxisMode::vertical, AxisMode::horizontal})
    CHECK(parse_axis_mode(to_string(m)) == m);
  for (auto k : {SpeedProfileKind::fast, SpeedProfileKind::slow, SpeedProfileKind::mixed})
    CHECK(parse_speed_profile(to_string(k)) == k);
  CHECK_THROWS_AS(parse_axis_mode("diagonal"), ConfigError);
}

}  // TEST_SUITE
