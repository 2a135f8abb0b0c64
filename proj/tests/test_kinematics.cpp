#include "esdcbf/kinematics.hpp"
#include "esdcbf/oracles.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

using namespace esdcbf;

namespace {

// Independent reference: compose homogeneous transforms link by link.
Vec3 transform_chain_tip(const JointConfig& q, const KinematicParams& p) {
  using Eigen::AngleAxisd;
  using Eigen::Translation3d;
  const Eigen::Affine3d T = Translation3d(0, 0, q.d1) * Translation3d(0, 0, p.l1) *
                            AngleAxisd(q.theta2, Vec3::UnitY()) * Translation3d(0, 0, p.l2) *
                            AngleAxisd(q.theta3, Vec3::UnitX()) * Translation3d(0, 0, p.l_end);
  return T * Vec3::Zero();
}

}  // namespace

TEST_SUITE("kinematics") {
  TEST_CASE("straight configuration stacks the links along z") {
    const KinematicParams p;
    const Vec3 x = forward_kinematics({5.0, 0.0, 0.0}, p);
    CHECK(x.x() == doctest::Approx(0.0));
    CHECK(x.y() == doctest::Approx(0.0));
    CHECK(x.z() == doctest::Approx(35.0));
  }

  TEST_CASE("bending joint 2 by a right angle lays the distal links along x") {
    const KinematicParams p;
    const JointConfig q{0.0, std::numbers::pi / 2, 0.0};
    const Vec3 x = forward_kinematics(q, p);
    const Vec3 ref = transform_chain_tip(q, p);
    CHECK((x - ref).norm() < 1e-12);
    CHECK(x.x() == doctest::Approx(27.0));
    CHECK(x.z() == doctest::Approx(3.0));
  }

  TEST_CASE("forward kinematics agrees with a homogeneous transform chain") {
    const KinematicParams p;
    test::JointSampler sample(11);
    for (int i = 0; i < 1000; ++i) {
      const JointConfig q = sample();
      CHECK((forward_kinematics(q, p) - transform_chain_tip(q, p)).norm() < 1e-12);
    }
  }

  TEST_CASE("the prismatic joint translates the tip along z only") {
    const KinematicParams p;
    test::JointSampler sample(12);
    for (int i = 0; i < 200; ++i) {
      JointConfig q = sample();
      const Vec3 x0 = forward_kinematics(q, p);
      q.d1 += 2.5;
      const Vec3 dx = forward_kinematics(q, p) - x0;
      CHECK(dx.x() == 0.0);
      CHECK(dx.y() == 0.0);
      CHECK(dx.z() == doctest::Approx(2.5).epsilon(1e-12));
      CHECK(jacobian(q, p).col(0) == Vec3::UnitZ());
    }
  }

  TEST_CASE("analytic jacobian matches central differences") {
    const KinematicParams p;
    test::JointSampler sample(13);
    for (int i = 0; i < 1000; ++i) {
      const JointConfig q = sample();
      const Mat3 fd = oracle::fd_jacobian(
          [&](const Vec3& v) { return forward_kinematics(JointConfig::from_vector(v), p); }, q.vector(), 1e-5);
      CHECK((jacobian(q, p) - fd).cwiseAbs().maxCoeff() < 1e-4);
    }
  }

  TEST_CASE("jacobian has full rank at zero bending") {
    const Mat3 J = jacobian({10.0, 0.0, 0.0}, KinematicParams{});
    CHECK(numerical_rank(J) == 3);
    CHECK(Eigen::FullPivLU<Mat3>(J).rank() == 3);
  }

  TEST_CASE("rank drops when the distal link folds back onto the joint-2 axis") {
    // With l_end = l2 and theta3 = pi the tip sits on the joint-2 axis, so theta2 stops moving it.
    KinematicParams p;
    p.l2 = 10.0;
    p.l_end = 10.0;
    p.angle_limit = std::numbers::pi;
    const Mat3 J = jacobian({5.0, 0.3, std::numbers::pi}, p);
    CHECK(numerical_rank(J, 1e-9) < 3);
  }

  TEST_CASE("damped pseudo-inverse examples") {
    CHECK(damped_pseudo_inverse(Mat3::Identity(), 0.0).isApprox(Mat3::Identity(), 1e-15));
    CHECK(damped_pseudo_inverse(Mat3::Identity(), 1.0).isApprox(0.5 * Mat3::Identity(), 1e-15));
  }

  TEST_CASE("undamped pseudo-inverse of a well-conditioned jacobian equals the LU inverse") {
    const KinematicParams p;
    test::JointSampler sample(14);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
      const JointConfig q = sample();
      const Mat3 J = jacobian(q, p);
      const Eigen::JacobiSVD<Mat3> svd(J);
      if (svd.singularValues().minCoeff() < 0.1) continue;
      const Mat3 inv = J.fullPivLu().inverse();
      const double err = (damped_pseudo_inverse(J, 0.0) - inv).norm() / inv.norm();
      CHECK(err < 1e-9);
      ++checked;
    }
    CHECK(checked > 100);
  }

  TEST_CASE("reconstruction residual shrinks as damping goes to zero") {
    const Mat3 J = jacobian({5.0, 0.4, -0.7}, KinematicParams{});
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {1.0, 1e-1, 1e-2, 1e-3, 1e-4}) {
      const double res = (J * damped_pseudo_inverse(J, lambda) - Mat3::Identity()).norm();
      CHECK(res < prev);
      prev = res;
    }
  }

  TEST_CASE("pseudo-inverse error paths") {
    Mat3 singular = Mat3::Zero();
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(damped_pseudo_inverse(singular, 0.0), Error);
    try {
      damped_pseudo_inverse(singular, 0.0);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularMatrix);
    }
    CHECK_NOTHROW(damped_pseudo_inverse(singular, 1e-3));
    try {
      damped_pseudo_inverse(Mat3::Identity(), -1.0);
      FAIL("negative damping accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
  }

  TEST_CASE("joint limits and parameter validation") {
    const KinematicParams p;
    CHECK(JointConfig{10.0, 0.2, -0.2}.within_limits(p));
    CHECK_FALSE(JointConfig{-1.0, 0.0, 0.0}.within_limits(p));
    CHECK_FALSE(JointConfig{10.0, 2.0, 0.0}.within_limits(p));
    KinematicParams bad = p;
    bad.l2 = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_NOTHROW(p.validate());
  }

  TEST_CASE("chain point jacobian derivatives match finite differences") {
    test::JointSampler sample(15);
    for (int i = 0; i < 100; ++i) {
      const JointConfig q = sample();
      const ChainPoint cp = chain_point(q, 3.0, 10.0, 17.0);
      for (int k = 0; k < 3; ++k) {
        const Mat3 fd = oracle::fd_matrix_derivative(
            [&](double s) {
              Vec3 v = q.vector();
              v[k] += s;
              return chain_point(JointConfig::from_vector(v), 3.0, 10.0, 17.0).jacobian;
            },
            1e-3);
        CHECK((cp.jacobian_derivative[k] - fd).cwiseAbs().maxCoeff() < 1e-6);
      }
    }
  }
}
