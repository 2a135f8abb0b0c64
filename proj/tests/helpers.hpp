#pragma once

#include "esdcbf/kinematics.hpp"

#include <random>

namespace esdcbf::test {

// Joint configurations drawn inside the joint limits, with a fixed seed so failures reproduce.
class JointSampler {
 public:
  explicit JointSampler(std::uint64_t seed, const KinematicParams& p = {}) : rng_(seed), p_(p) {}

  JointConfig operator()() {
    std::uniform_real_distribution<double> d1(0.0, p_.d1_max);
    std::uniform_real_distribution<double> ang(-p_.angle_limit, p_.angle_limit);
    return {d1(rng_), ang(rng_), ang(rng_)};
  }

  Vec3 vec(double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng_), u(rng_), u(rng_)};
  }

  double scalar(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  KinematicParams p_;
};

}  // namespace esdcbf::test
