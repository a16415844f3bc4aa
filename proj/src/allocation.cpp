#include "adepth/allocation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

namespace adepth {
namespace {

// Roots of q(x) = x^2 + 2 h x + k, sorted ascending. Uses the cancellation-free
// form for the root of larger magnitude.
std::optional<std::array<double, 2>> monic_roots(double h, double k, double disc_tol) {
  double disc = h * h - k;
  if (disc < -disc_tol) return std::nullopt;
  disc = std::max(disc, 0.0);
  const double sq = std::sqrt(disc);
  const double big = -h - std::copysign(sq, h);
  double lo = big;
  double hi = (big != 0.0) ? k / big : 0.0;
  if (lo > hi) std::swap(lo, hi);
  return std::array<double, 2>{lo, hi};
}

// Roots of a x^2 + bq x + c with a > 0.
std::optional<std::array<double, 2>> quadratic_roots(double a, double bq, double c) {
  const double disc = bq * bq - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double qv = -0.5 * (bq + std::copysign(sq, bq));
  double x1 = qv / a;
  double x2 = (qv != 0.0) ? c / qv : x1;
  if (x1 > x2) std::swap(x1, x2);
  return std::array<double, 2>{x1, x2};
}

struct Admissible {
  double lambda2;
};

// For fixed lambda1, finds lambda2 in [-b, b] with |lambda1 v1 + lambda2 v2| = r,
// preferring the smallest |lambda2|.
std::optional<Admissible> admissible_lambda2(double lambda1, double a, double c, double r,
                                             double b) {
  const double scale = std::max({r * r, a * lambda1 * lambda1, 1e-300});
  const auto roots = monic_roots(c * lambda1, a * lambda1 * lambda1 - r * r, 1e-12 * scale);
  if (!roots) return std::nullopt;
  const double btol = 1e-12 * std::max(1.0, b);
  std::optional<Admissible> best;
  for (double l2 : *roots) {
    if (std::abs(l2) > b + btol) continue;
    l2 = std::clamp(l2, -b, b);
    if (!best || std::abs(l2) < std::abs(best->lambda2)) best = Admissible{l2};
  }
  return best;
}

AllocationSolution assemble(const AllocationProblem& p, double lambda1, double lambda2) {
  AllocationSolution sol;
  sol.lambda1 = lambda1;
  sol.lambda2 = lambda2;
  const Eigen::VectorXd w = lambda1 * p.v1 + lambda2 * p.v2;
  const double n = w.norm();
  sol.v_r = (n > 0.0) ? Eigen::VectorXd(w / n) : Eigen::VectorXd(p.v2);
  sol.feasible = true;
  return sol;
}

AllocationSolution infeasible(const AllocationProblem& p) {
  AllocationSolution sol;
  sol.v_r = Eigen::VectorXd::Zero(p.v1.size());
  sol.feasible = false;
  return sol;
}

}  // namespace

void AllocationProblem::validate() const {
  if (v1.size() != v2.size() || v1.size() == 0) {
    throw std::invalid_argument("allocation: v1 and v2 must have the same nonzero size");
  }
  if (!(v1.norm() > 0.0)) throw std::invalid_argument("allocation: |v1| must be positive");
  if (std::abs(v2.norm() - 1.0) >= 1e-12) {
    throw std::invalid_argument(fmt::format("allocation: |v2| = {} is not unit", v2.norm()));
  }
  if (!(r > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument(fmt::format("allocation: r = {} and b = {} must be positive", r, b));
  }
}

AllocationSolution solve_analytic(const AllocationProblem& p) {
  p.validate();
  const double a = p.v1.squaredNorm();
  const double c = p.v1.dot(p.v2);
  const double d2 = std::max(0.0, a - c * c);
  const double r = p.r;
  const double b = p.b;

  std::array<double, 7> cand{};
  std::size_t n = 0;
  cand[n++] = 1.0;
  cand[n++] = 0.0;
  if (d2 > 0.0) cand[n++] = r / std::sqrt(d2);
  for (double sign : {1.0, -1.0}) {
    // |lambda1 v1 + sign b v2|^2 = r^2
    if (auto roots = quadratic_roots(a, 2.0 * sign * b * c, b * b - r * r)) {
      cand[n++] = (*roots)[0];
      cand[n++] = (*roots)[1];
    }
  }
  std::sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n), std::greater<>());

  constexpr double kRangeTol = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    double l1 = cand[i];
    if (l1 > 1.0 + kRangeTol || l1 < -kRangeTol) continue;
    l1 = std::clamp(l1, 0.0, 1.0);
    if (auto adm = admissible_lambda2(l1, a, c, r, b)) {
      return assemble(p, l1, adm->lambda2);
    }
  }
  return infeasible(p);
}

AllocationSolution solve_bruteforce(const AllocationProblem& p, int grid_n) {
  if (grid_n < 1) throw std::invalid_argument("solve_bruteforce: grid_n must be positive");
  p.validate();
  // F(l1, l2) = |l1 v1 + l2 v2|^2 - r^2, jointly convex.
  const double qa = p.v2.squaredNorm();
  const double v12 = p.v1.dot(p.v2);
  const double v11 = p.v1.squaredNorm();
  auto F = [&](double l1, double l2) {
    return v11 * l1 * l1 + 2.0 * v12 * l1 * l2 + qa * l2 * l2 - p.r * p.r;
  };

  for (int k = grid_n; k >= 0; --k) {
    const double hi = static_cast<double>(k) / grid_n;

    // Grid point: F(hi, .) is a convex quadratic in l2.
    const double qb = 2.0 * hi * v12;
    const double qc = hi * hi * v11 - p.r * p.r;
    const double l2_min = std::clamp(-qb / (2.0 * qa), -p.b, p.b);
    if (F(hi, l2_min) <= 0.0 && std::max(F(hi, -p.b), F(hi, p.b)) >= 0.0) {
      double best = std::numeric_limits<double>::infinity();
      if (auto roots = quadratic_roots(qa, qb, qc)) {
        for (double l2 : *roots) {
          if (std::abs(l2) <= p.b * (1.0 + 1e-12) && std::abs(l2) < std::abs(best)) best = l2;
        }
      }
      if (std::isfinite(best)) return assemble(p, hi, std::clamp(best, -p.b, p.b));
    }
    if (k == 0) break;

    // Open cell (lo, hi): feasible sets thinner than the grid spacing live
    // here. Min of F over the box is on an edge, max at a vertex.
    const double lo = static_cast<double>(k - 1) / grid_n;
    std::array<std::array<double, 2>, 4> edge_min = {{
        {lo, std::clamp(-v12 * lo / qa, -p.b, p.b)},
        {hi, std::clamp(-v12 * hi / qa, -p.b, p.b)},
        {std::clamp(v12 * p.b / v11, lo, hi), -p.b},
        {std::clamp(-v12 * p.b / v11, lo, hi), p.b},
    }};
    const std::array<std::array<double, 2>, 4> corners = {{{lo, -p.b}, {lo, p.b}, {hi, -p.b}, {hi, p.b}}};
    auto by_value = [&](const auto& x, const auto& y) { return F(x[0], x[1]) < F(y[0], y[1]); };
    const auto pmin = *std::min_element(edge_min.begin(), edge_min.end(), by_value);
    const auto pmax = *std::max_element(corners.begin(), corners.end(), by_value);
    if (F(pmin[0], pmin[1]) > 0.0 || F(pmax[0], pmax[1]) < 0.0) continue;

    // Bisect along the segment from the minimizer to the maximizer.
    double t0 = 0.0, t1 = 1.0;
    auto at = [&](double t, int i) { return pmin[i] + t * (pmax[i] - pmin[i]); };
    for (int it = 0; it < 200 && t1 - t0 > 0.0; ++it) {
      const double tm = 0.5 * (t0 + t1);
      if (tm == t0 || tm == t1) break;
      (F(at(tm, 0), at(tm, 1)) <= 0.0 ? t0 : t1) = tm;
    }
    const double e0 = std::abs(F(at(t0, 0), at(t0, 1)));
    const double e1 = std::abs(F(at(t1, 0), at(t1, 1)));
    const double t = e0 <= e1 ? t0 : t1;
    return assemble(p, at(t, 0), at(t, 1));
  }
  return infeasible(p);
}

bool is_feasible(const AllocationProblem& p) { return solve_analytic(p).feasible; }

double constraint_residual(const AllocationProblem& p, const AllocationSolution& sol) {
  return (sol.lambda1 * p.v1 + sol.lambda2 * p.v2 - p.r * sol.v_r).norm();
}

}  // namespace adepth
