#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace esdcbf {

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  std::size_t qp_instances = 10000;
  // Test hook: flips the sign of the gravity term inside the dynamics used by
  // the energy audit. The audit must then fail.
  bool corrupt_gravity_sign = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Stable, documented order.
const std::vector<std::string>& verify_suite_names();

SuiteResult run_suite(const std::string& name, const VerifyOptions& opts);
std::vector<SuiteResult> run_verification(const VerifyOptions& opts);

}  // namespace esdcbf
