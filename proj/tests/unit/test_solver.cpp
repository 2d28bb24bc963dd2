#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "jointaxis/errors.hpp"
#include "jointaxis/evaluation.hpp"
#include "jointaxis/simulator.hpp"
#include "jointaxis/solver.hpp"

using namespace jointaxis;

namespace {

std::vector<SamplePair> window_of(const HingeScenario& sc, std::size_t start, std::size_t n) {
  auto sim = simulate(sc);
  return {sim.recording.samples.begin() + start, sim.recording.samples.begin() + start + n};
}

HingeScenario free_fast(std::uint64_t seed = 5) {
  HingeScenario sc;
  sc.duration = 12.0;
  sc.seed = seed;
  return sc;
}

double axis_error_mod_sign(const Vec3& est, const Vec3& truth) {
  return std::min(angular_deviation(est, truth), angular_deviation(-est, truth));
}

ResidualWeights weighted(const NoiseModel& n = {}) {
  return weights_for(MethodSpec::combined_weighted, n);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("cost is near zero at the true axes of noise-free data") {
  auto sc = free_fast();
  auto data = window_of(sc, 100, 500);
  AxisParams truth = params_from_axes({sc.j1_true, sc.j2_true});
  // the gyro part vanishes exactly; rotation-only accelerometer effects do not,
  // so check the gyro-only cost here and the full cost on fixed-axis motion
  CHECK(cost(truth, data, weights_for(MethodSpec::gyro_only, {})) < 1e-18 * data.size());

  HingeScenario fixed = sc;
  fixed.axis_mode = AxisMode::vertical;
  auto still = window_of(fixed, 100, 500);
  AxisParams t2 = params_from_axes({fixed.j1_true, fixed.j2_true});
  CHECK(cost(t2, still, weighted()) < 1e-18 * still.size());
}

TEST_CASE("cost symmetries") {
  auto sc = free_fast();
  sc.noise = NoiseModel{};
  auto data = window_of(sc, 0, 300);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    AxisParams x = random_initialization(rng());
    auto ax = axes_from_params(x);
    AxisParams both = params_from_axes({-ax.j1, -ax.j2});
    AxisParams second = params_from_axes({ax.j1, -ax.j2});

    double v = cost(x, data, weighted());
    CHECK(cost(both, data, weighted()) == doctest::Approx(v).epsilon(1e-12));

    auto gyro = weights_for(MethodSpec::gyro_only, {});
    double g = cost(x, data, gyro);
    CHECK(cost(second, data, gyro) == doctest::Approx(g).epsilon(1e-12));
  }
  // the accelerometer term separates the two pairings at the truth
  AxisParams truth = params_from_axes({sc.j1_true, sc.j2_true});
  AxisParams wrong = params_from_axes({sc.j1_true, -sc.j2_true});
  CHECK(cost(wrong, data, weighted()) > 10.0 * cost(truth, data, weighted()));
}

TEST_CASE("cost rejects empty data") {
  std::vector<SamplePair> none;
  CHECK_THROWS_AS(cost(AxisParams{}, none, ResidualWeights{}), ArgumentError);
}

TEST_CASE("noise-free recovery from random starts") {
  // With zero lever arms both constraints hold exactly, so the global
  // minimum is the truth. Lever arms bias the free-axis case; see the
  // simulator tests.
  auto sc = free_fast();
  sc.r1 = sc.r2 = Vec3::Zero();
  auto data = window_of(sc, 200, 500);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = estimate_axes(data, weighted(), SolverConfig{}, random_initialization(seed));
    CHECK(r.converged);
    CHECK(axis_error_mod_sign(r.axes.j1, sc.j1_true) < 0.1);
    CHECK(axis_error_mod_sign(r.axes.j2, sc.j2_true) < 0.1);
    // correct pairing: both flipped or neither
    CHECK(r.axes.j1.dot(sc.j1_true) * r.axes.j2.dot(sc.j2_true) > 0.0);
  }
}

TEST_CASE("noisy recovery at sensor noise levels") {
  auto sc = free_fast();
  sc.noise = NoiseModel{};
  auto data = window_of(sc, 200, 500);
  auto r = estimate_axes(data, weighted(), SolverConfig{}, random_initialization(1));
  CHECK(r.converged);
  AxisPair fixed = resolve_sign(r.axes, sc.j1_true);
  CHECK(angular_deviation(fixed.j1, sc.j1_true) < 2.0);
  CHECK(angular_deviation(fixed.j2, sc.j2_true) < 2.0);
}

TEST_CASE("starting at the truth stops almost at once") {
  auto sc = free_fast();
  sc.axis_mode = AxisMode::vertical;
  auto data = window_of(sc, 0, 500);
  auto r = estimate_axes(data, weighted(), SolverConfig{},
                         params_from_axes({sc.j1_true, sc.j2_true}));
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
}

TEST_CASE("line search keeps the trace monotone and the result below the start") {
  auto sc = free_fast(9);
  sc.noise = NoiseModel{};
  auto data = window_of(sc, 50, 500);
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    AxisParams x0 = random_initialization(seed);
    auto r = estimate_axes(data, weighted(), SolverConfig{}, x0);
    CHECK(r.final_cost <= cost(x0, data, weighted()));
    CHECK(r.final_cost >= 0.0);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].cost <= r.trace[i - 1].cost);
  }
}

TEST_CASE("solver is deterministic and insensitive to sample order") {
  auto sc = free_fast();
  auto data = window_of(sc, 0, 500);
  AxisParams x0 = random_initialization(77);
  auto a = estimate_axes(data, weighted(), SolverConfig{}, x0);
  auto b = estimate_axes(data, weighted(), SolverConfig{}, x0);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].cost == b.trace[i].cost);
    CHECK(a.trace[i].step_norm == b.trace[i].step_norm);
  }
  CHECK(a.params.as_vector() == b.params.as_vector());

  auto shuffled = data;
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto c = estimate_axes(shuffled, weighted(), SolverConfig{}, x0);
  CHECK((c.axes.j1 - a.axes.j1).norm() < 1e-9);
  CHECK((c.axes.j2 - a.axes.j2).norm() < 1e-9);
}

TEST_CASE("estimate_axes argument checks") {
  auto data = window_of(free_fast(), 0, 10);
  std::span<const SamplePair> three(data.data(), 3);
  CHECK_THROWS_AS(estimate_axes(three, weighted(), SolverConfig{}, AxisParams{}), ArgumentError);
  AxisParams bad{std::numeric_limits<double>::quiet_NaN(), 0, 0, 0};
  CHECK_THROWS_AS(estimate_axes(data, weighted(), SolverConfig{}, bad), ArgumentError);
  SolverConfig cfg;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("non-finite data ends the run with a diagnostic instead of throwing") {
  auto data = window_of(free_fast(), 0, 20);
  data[3].gyr1.x() = std::numeric_limits<double>::infinity();
  EstimationResult r;
  CHECK_NOTHROW(r = estimate_axes(data, weighted(), SolverConfig{}, AxisParams{0.1, 0.2, 0.3, 0.4}));
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("iteration limit is reported as non-convergence") {
  auto sc = free_fast();
  auto data = window_of(sc, 0, 500);
  SolverConfig cfg;
  cfg.max_iterations = 1;
  auto r = estimate_axes(data, weighted(), cfg, random_initialization(4));
  CHECK_FALSE(r.converged);
  CHECK(r.diagnostic == "iteration limit reached");
}

TEST_CASE("random initialization is uniform on the sphere") {
  const int n = 100000;
  Eigen::Vector3d m1 = Eigen::Vector3d::Zero(), m2 = Eigen::Vector3d::Zero();
  int up1 = 0, up2 = 0;
  for (int i = 0; i < n; ++i) {
    auto ax = axes_from_params(random_initialization(derive_seed(2024, i)));
    m1 += ax.j1;
    m2 += ax.j2;
    up1 += ax.j1.z() > 0;
    up2 += ax.j2.z() > 0;
  }
  m1 /= n;
  m2 /= n;
  CHECK(m1.cwiseAbs().maxCoeff() < 0.01);
  CHECK(m2.cwiseAbs().maxCoeff() < 0.01);
  CHECK(std::abs(up1 / double(n) - 0.5) < 0.01);
  CHECK(std::abs(up2 / double(n) - 0.5) < 0.01);

  CHECK(random_initialization(42).as_vector() == random_initialization(42).as_vector());
  CHECK(random_initialization(42).as_vector() != random_initialization(43).as_vector());
}

TEST_CASE("derived seeds") {
  CHECK(derive_seed(99, 0) == 99);
  CHECK(derive_seed(99, 1) != derive_seed(99, 2));
  CHECK(derive_seed(99, 1) == derive_seed(99, 1));
}

TEST_CASE("multistart") {
  auto sc = free_fast();
  auto data = window_of(sc, 0, 500);
  auto w = weighted();
  SolverConfig cfg;

  auto one = estimate_axes_multistart(data, w, cfg, 1, 5);
  auto direct = estimate_axes(data, w, cfg, random_initialization(5));
  CHECK(one.params.as_vector() == direct.params.as_vector());
  CHECK(one.final_cost == direct.final_cost);

  auto best = estimate_axes_multistart(data, w, cfg, 8, 5);
  for (int i = 0; i < 8; ++i) {
    auto run = estimate_axes(data, w, cfg, random_initialization(derive_seed(5, i)));
    CHECK(best.final_cost <= run.final_cost);
  }
  CHECK_THROWS_AS(estimate_axes_multistart(data, w, cfg, 0, 5), ArgumentError);

  // fixed-axis motion without lever-arm effects: the minimum is exactly zero
  HingeScenario v = sc;
  v.axis_mode = AxisMode::vertical;
  auto vd = window_of(v, 0, 500);
  auto vb = estimate_axes_multistart(vd, w, cfg, 8, 5);
  CHECK(vb.final_cost < 1e-15 * vd.size());
}

}  // TEST_SUITE
