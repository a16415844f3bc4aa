#pragma once

#include <Eigen/Dense>

namespace adepth {

/// Non-convex allocation problem
///
///   maximize    lambda1
///   subject to  lambda1 v1 + lambda2 v2 = r v_r,  |v_r| = 1,
///               0 <= lambda1 <= 1,  -b <= lambda2 <= b
///
/// with |v1| > 0, |v2| = 1 and r, b > 0. Always feasible when r <= b
/// (lambda1 = 0, lambda2 = r, v_r = v2).
struct AllocationProblem {
  Eigen::VectorXd v1;
  Eigen::VectorXd v2;
  double r = 0.0;
  double b = 0.0;

  /// Throws std::invalid_argument if the problem is malformed.
  void validate() const;
};

struct AllocationSolution {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Eigen::VectorXd v_r;
  bool feasible = false;
};

bool is_feasible(const AllocationProblem& p);

/// Closed-form solution. The optimal lambda1 is one of a handful of
/// candidates: 1, the tangency point r / |v1 - (v1.v2) v2|, or a root of
/// |lambda1 v1 +- b v2| = r. The largest feasible candidate wins. Ties in
/// lambda2 resolve to the smallest magnitude. Infeasible problems return a
/// zero solution with `feasible == false`.
AllocationSolution solve_analytic(const AllocationProblem& p);

/// Grid-search reference: scans lambda1 = k / grid_n downwards and returns
/// the first value admitting a lambda2 in [-b, b]. Each open cell between two
/// grid points is also tested exactly (convex min over the box, max at a
/// corner), so feasible bands thinner than the spacing are not missed; a hit
/// inside a cell returns a feasible point of that cell. Accurate to 1 / grid_n.
AllocationSolution solve_bruteforce(const AllocationProblem& p, int grid_n);

/// |lambda1 v1 + lambda2 v2 - r v_r|
double constraint_residual(const AllocationProblem& p, const AllocationSolution& sol);

}  // namespace adepth
