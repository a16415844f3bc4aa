#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "adepth/allocation.hpp"
#include "adepth/controllers.hpp"
#include "adepth/observer.hpp"

namespace adepth {

/// Random instance generators shared by the self-test and the test suites.
/// Problems mix r <= b and r > b.
AllocationProblem random_allocation_problem(std::mt19937_64& rng);
/// Same distribution restricted to r <= b.
AllocationProblem random_feasible_allocation_problem(std::mt19937_64& rng);
Vec2 random_feature(std::mt19937_64& rng, double max_abs = 0.8);
CameraTwist random_twist(std::mt19937_64& rng, double v_scale = 0.5, double w_scale = 0.5);
EstimatorState random_estimate(std::mt19937_64& rng);

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  std::string first_failure;

  bool ok() const { return passed == total; }
};

struct SelftestOptions {
  std::uint64_t seed = 20190101;
  int samples = 2000;
  int grid_n = 4000;
  /// Fault injection: added to the closed-form lambda1 before comparison.
  double solver_bias = 0.0;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts = {});

/// Prints one line per suite; returns true when every suite passed.
bool report_selftest(const std::vector<SuiteResult>& results, std::ostream& out);

}  // namespace adepth
