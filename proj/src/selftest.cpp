#include "adepth/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "adepth/geometry.hpp"
#include "adepth/stability.hpp"

namespace adepth {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::VectorXd random_direction(std::mt19937_64& rng, int dim) {
  Eigen::VectorXd d(dim);
  do {
    for (int i = 0; i < dim; ++i) d(i) = uniform(rng, -1.0, 1.0);
  } while (d.norm() < 1e-3);
  return d.normalized();
}

class Suite {
 public:
  explicit Suite(std::string name) { r_.name = std::move(name); }

  void check(bool ok, const std::string& what) {
    ++r_.total;
    if (ok) {
      ++r_.passed;
    } else if (r_.first_failure.empty()) {
      r_.first_failure = what;
    }
  }

  SuiteResult result() const { return r_; }

 private:
  SuiteResult r_;
};

SuiteResult allocation_suite(const SelftestOptions& o, std::mt19937_64& rng) {
  Suite suite("allocation: closed form vs grid search");
  const double tol = 2.0 / o.grid_n;
  for (int i = 0; i < o.samples; ++i) {
    const AllocationProblem p = random_allocation_problem(rng);
    AllocationSolution a = solve_analytic(p);
    const AllocationSolution g = solve_bruteforce(p, o.grid_n);
    a.lambda1 += o.solver_bias;
    const bool ok = a.feasible == g.feasible &&
                    (!a.feasible || (std::abs(a.lambda1 - g.lambda1) <= tol &&
                                     constraint_residual(p, a) <= 1e-9));
    suite.check(ok, fmt::format("sample {}: analytic {:.6f}, grid {:.6f}", i, a.lambda1, g.lambda1));
  }
  return suite.result();
}

SuiteResult interaction_suite(const SelftestOptions& o, std::mt19937_64& rng) {
  Suite suite("geometry: stacked interaction matrix vs block form");
  for (int i = 0; i < o.samples; ++i) {
    const Vec2 s = random_feature(rng);
    const double chi = uniform(rng, 0.05, 5.0);
    const CameraTwist u = random_twist(rng);
    Eigen::Matrix<double, 6, 1> uu;
    uu << u.v, u.w;
    const Vec3 stacked = interaction_matrix(s, chi) * uu;
    const FeatureRates r = feature_dynamics(s, chi, u);
    const double err = std::max((stacked.head<2>() - r.s_dot).cwiseAbs().maxCoeff(),
                                std::abs(stacked(2) - r.chi_dot));
    suite.check(err <= 1e-12, fmt::format("sample {}: deviation {:.3e}", i, err));
  }
  return suite.result();
}

SuiteResult error_dynamics_suite(const SelftestOptions& o, std::mt19937_64& rng) {
  Suite suite("observer: error dynamics = plant - observer");
  const ObserverGains g;
  for (int i = 0; i < o.samples; ++i) {
    const Vec2 s = random_feature(rng);
    const double chi = uniform(rng, 0.05, 5.0);
    const EstimatorState est = random_estimate(rng);
    const CameraTwist u = random_twist(rng);
    const FeatureRates plant = feature_dynamics(s, chi, u);
    const FeatureRates obs = observer_rhs(s, est, u, g);
    const FeatureRates err = error_rhs(s, chi, est, u, g);
    const double scale = 1.0 + g.k_chi;
    const double dev = std::max((plant.s_dot - obs.s_dot - err.s_dot).cwiseAbs().maxCoeff(),
                                std::abs(plant.chi_dot - obs.chi_dot - err.chi_dot) / scale);
    suite.check(dev <= 1e-12, fmt::format("sample {}: deviation {:.3e}", i, dev));
  }
  return suite.result();
}

SuiteResult lyapunov_suite(const SelftestOptions& o, std::mt19937_64& rng) {
  Suite suite("stability: closed-form dV/dt vs chain rule");
  const ObserverGains g;
  for (int i = 0; i < o.samples; ++i) {
    const Vec2 s = random_feature(rng);
    const double chi = uniform(rng, 0.05, 5.0);
    const EstimatorState est = random_estimate(rng);
    const CameraTwist u = random_twist(rng);
    const ErrorState e = estimation_error(s, chi, est);
    const FeatureRates de = error_rhs(s, chi, est, u, g);
    const double chain = e.s_tilde.dot(de.s_dot) + e.chi_tilde * de.chi_dot / g.k_chi;
    const double closed = lyapunov_rate(s, chi, est, u, g);
    const double dev = std::abs(chain - closed) / (1.0 + std::abs(chain));
    suite.check(dev <= 1e-12, fmt::format("sample {}: relative deviation {:.3e}", i, dev));
  }
  return suite.result();
}

}  // namespace

AllocationProblem random_allocation_problem(std::mt19937_64& rng) {
  const int dim = 2;
  AllocationProblem p;
  p.v1 = random_direction(rng, dim) * uniform(rng, 0.05, 2.0);
  p.v2 = random_direction(rng, dim);
  p.r = uniform(rng, 0.01, 2.0);
  p.b = uniform(rng, 0.01, 2.0);
  return p;
}

AllocationProblem random_feasible_allocation_problem(std::mt19937_64& rng) {
  AllocationProblem p = random_allocation_problem(rng);
  if (p.r > p.b) std::swap(p.r, p.b);
  return p;
}

Vec2 random_feature(std::mt19937_64& rng, double max_abs) {
  return Vec2(uniform(rng, -max_abs, max_abs), uniform(rng, -max_abs, max_abs));
}

CameraTwist random_twist(std::mt19937_64& rng, double v_scale, double w_scale) {
  CameraTwist u;
  for (int i = 0; i < 3; ++i) {
    u.v(i) = uniform(rng, -v_scale, v_scale);
    u.w(i) = uniform(rng, -w_scale, w_scale);
  }
  return u;
}

EstimatorState random_estimate(std::mt19937_64& rng) {
  EstimatorState est;
  est.s_hat = random_feature(rng);
  est.chi_hat = uniform(rng, 0.0, 5.0);
  return est;
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::vector<SuiteResult> out;
  out.push_back(allocation_suite(opts, rng));
  out.push_back(interaction_suite(opts, rng));
  out.push_back(error_dynamics_suite(opts, rng));
  out.push_back(lyapunov_suite(opts, rng));
  return out;
}

bool report_selftest(const std::vector<SuiteResult>& results, std::ostream& out) {
  int passed = 0;
  int total = 0;
  int suites_ok = 0;
  for (const SuiteResult& r : results) {
    fmt::print(out, "[{}] {}: {}/{} passed\n", r.ok() ? "PASS" : "FAIL", r.name, r.passed, r.total);
    if (!r.ok()) fmt::print(out, "       first failure: {}\n", r.first_failure);
    passed += r.passed;
    total += r.total;
    suites_ok += r.ok() ? 1 : 0;
  }
  fmt::print(out, "selftest: {}/{} suites passed, {}/{} checks passed\n", suites_ok,
             results.size(), passed, total);
  return suites_ok == static_cast<int>(results.size());
}

}  // namespace adepth
