#pragma once

#include <cstdint>
#include <random>

#include "jointaxis/kinematics.hpp"

namespace testutil {

inline jointaxis::Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng), n(rng)};
}

inline jointaxis::Vec3 random_unit(std::mt19937_64& rng) {
  jointaxis::Vec3 v;
  do {
    v = random_vec(rng);
  } while (v.norm() < 1e-3);
  return v.normalized();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testutil
