#include "esdcbf/control.hpp"
#include "esdcbf/scenario.hpp"
#include "esdcbf/sim.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace esdcbf;

namespace {

std::string read_source(const char* rel) {
  std::ifstream in(std::string(ESDCBF_SOURCE_DIR) + "/" + rel);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double step_decay(double k_d, const Vec3& v) {
  ScenarioSpec spec = scenario_catalog(1);
  spec.controller.k_d = k_d;
  return measure_decay_rate(step_response(spec, v, 1.0));
}

}  // namespace

TEST_SUITE("control") {
  TEST_CASE("velocity error is zero when the tip already moves at the safe velocity") {
    const KinematicParams kp;
    ControllerParams cp;
    cp.damping = 0.0;
    test::JointSampler sample(41);
    for (int i = 0; i < 100; ++i) {
      const JointConfig q = sample();
      if (numerical_rank(jacobian(q, kp), 1e-3) < 3) continue;
      const RobotState s{q, sample.vec(-1.0, 1.0)};
      const Vec3 xdot = jacobian(q, kp) * s.qdot;
      CHECK(velocity_error(s, xdot, cp, kp).norm() < 1e-9);
    }
  }

  TEST_CASE("velocity error maps the task-space error back to joint space") {
    const KinematicParams kp;
    ControllerParams cp;
    cp.damping = 0.0;
    const RobotState s{{10.0, 0.3, -0.2}, {0.5, 0.1, -0.1}};
    const Vec3 xdot_s{1.0, -2.0, 0.5};
    const Vec3 edot = velocity_error(s, xdot_s, cp, kp);
    CHECK((jacobian(s.q, kp) * edot - (jacobian(s.q, kp) * s.qdot - xdot_s)).norm() < 1e-9);
  }

  TEST_CASE("control law is a linear gain on the error") {
    ControllerParams cp;
    cp.k_d = 2.0;
    CHECK(control_law({1.0, -1.0, 0.5}, cp) == Vec3(-2.0, 2.0, -1.0));
    CHECK(control_law(Vec3::Zero(), cp) == Vec3::Zero());
    const Vec3 a{0.1, 0.2, 0.3}, b{-1.0, 4.0, 2.0};
    CHECK(control_law(a + b, cp).isApprox(control_law(a, cp) + control_law(b, cp)));
    ControllerParams bad;
    bad.k_d = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
  }

  TEST_CASE("controller is model-free by construction") {
    // The controller sources may not reach for the plant model.
    for (const char* file : {"src/control.cpp", "include/esdcbf/control.hpp"}) {
      const std::string text = read_source(file);
      CHECK(text.find("dynamics.hpp") == std::string::npos);
      CHECK(text.find("mass_matrix") == std::string::npos);
      CHECK(text.find("coriolis_matrix") == std::string::npos);
      CHECK(text.find("gravity_vector") == std::string::npos);
    }
  }

  TEST_CASE("disturbance waveforms respect their amplitude bound") {
    DisturbanceSpec none;
    CHECK(disturbance(0.3, none) == Vec3::Zero());

    DisturbanceSpec c;
    c.waveform = Waveform::Constant;
    c.amplitude = {1.0, -2.0, 0.5};
    CHECK(disturbance(0.0, c) == c.amplitude);
    CHECK(disturbance(7.5, c) == c.amplitude);

    DisturbanceSpec s;
    s.waveform = Waveform::Sinusoid;
    s.amplitude = {1.0, 2.0, 3.0};
    s.frequency = 3.0;
    s.seed = 7;
    for (int k = 0; k <= 10000; ++k) {
      const Vec3 d = disturbance(k * 1e-4, s);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(d[i]) <= std::abs(s.amplitude[i]) + 1e-12);
    }
  }

  TEST_CASE("sinusoid phases are reproducible from the seed") {
    DisturbanceSpec a;
    a.waveform = Waveform::Sinusoid;
    a.amplitude = {1.0, 1.0, 1.0};
    a.seed = 3;
    DisturbanceSpec b = a;
    CHECK(disturbance(0.37, a) == disturbance(0.37, b));
    b.seed = 4;
    CHECK(disturbance(0.37, a) != disturbance(0.37, b));
  }

  TEST_CASE("decay rate of a synthetic exponential") {
    std::vector<double> t, e;
    for (int k = 0; k <= 2000; ++k) {
      t.push_back(k * 1e-3);
      e.push_back(5.0 * std::exp(-3.0 * t.back()));
    }
    CHECK(measure_decay_rate(t, e) == doctest::Approx(3.0).epsilon(1e-3));
  }

  TEST_CASE("decay rate needs a transient") {
    const std::vector<double> t{0.0, 1e-3, 2e-3, 3e-3};
    const std::vector<double> zeros(4, 0.0);
    try {
      measure_decay_rate(t, zeros);
      FAIL("flat signal accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InsufficientTransient);
    }
  }

  TEST_CASE("step-response decay rate grows with the derivative gain") {
    const Vec3 lateral{2.0, 0.0, 0.0};
    const double slow = step_decay(3000.0, lateral);
    const double fast = step_decay(6000.0, lateral);
    CHECK(fast > slow);
    CHECK(fast > 0.4);
  }
}
