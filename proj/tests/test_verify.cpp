#include "esdcbf/common.hpp"
#include "esdcbf/verify.hpp"

#include <doctest.h>

using namespace esdcbf;

TEST_SUITE("verify") {
  TEST_CASE("suite list is stable") {
    const std::vector<std::string> expected{"jacobian-fd",       "barrier-gradient-fd", "pseudo-inverse",
                                            "mass-matrix-spd",   "coriolis-skew",       "gravity-fd",
                                            "dynamics-residual", "energy-audit",        "rk4-order",
                                            "qp-oracle"};
    CHECK(verify_suite_names() == expected);
  }

  TEST_CASE("every suite passes on a clean build") {
    VerifyOptions opts;
    opts.qp_instances = 2000;
    for (const auto& r : run_verification(opts)) {
      INFO(r.name << ": " << r.detail);
      CHECK(r.passed);
    }
  }

  TEST_CASE("a flipped gravity sign fails the energy audit and nothing else") {
    VerifyOptions opts;
    opts.corrupt_gravity_sign = true;
    CHECK_FALSE(run_suite("energy-audit", opts).passed);
    CHECK(run_suite("gravity-fd", opts).passed);
  }

  TEST_CASE("unknown suite name") {
    CHECK_THROWS_AS(run_suite("nope", VerifyOptions{}), Error);
  }
}
