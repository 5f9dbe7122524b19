#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "pns/milp.hpp"

namespace pns {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumerics };

struct LpResult {
  LpStatus status = LpStatus::kNumerics;
  double objective = 0.0;
  std::vector<double> x;  // structural variable values, size n
  int iterations = 0;
};

// Two-phase bounded-variable primal simplex over [A | I] with a dense
// explicit basis inverse. Phase 1 minimizes the total bound violation of the
// basic variables (composite objective), phase 2 is standard bounded-variable
// pricing with Bland's rule engaged after 2*(n+m) degenerate pivots.
//
// One solver is reusable across repeated solves of the same matrix under
// different variable bounds; the basis persists between calls, which makes
// sequences of related solves (branch-and-bound nodes, dives) cheap to
// reoptimize. Every optimal answer is verified against recomputed residuals;
// verification failure yields LpStatus::kNumerics, never a wrong answer.
class SimplexSolver {
 public:
  explicit SimplexSolver(const MilpInstance& inst);

  // Solves min c.x s.t. rows, lo <= x <= up (structural bounds, size n).
  // Continues from the basis left by the previous call.
  LpResult solve(std::span<const double> lo, std::span<const double> up);

  // Solve under the instance's own bounds.
  LpResult solve();

  // Restores the all-slack basis.
  void reset();

  int64_t total_iterations() const { return total_iterations_; }

 private:
  enum State : uint8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2, kFreeNonbasic = 3 };
  enum class StepOutcome { kProgress, kStuck, kUnbounded, kNumerics };

  int n_ = 0;      // structural variables
  int m_ = 0;      // rows
  int total_ = 0;  // n + m
  std::vector<std::vector<std::pair<int, double>>> cols_;  // structural columns
  Eigen::VectorXd rhs_;
  std::vector<double> cost_;  // size total_, zero on slacks
  std::vector<double> lo_, up_;

  Eigen::MatrixXd binv_;
  std::vector<int> basic_;
  std::vector<int> basic_row_of_;  // var -> row or -1
  std::vector<State> state_;
  std::vector<double> xval_;
  int64_t total_iterations_ = 0;
  int pivots_since_refactor_ = 0;
  int degenerate_pivots_ = 0;

  double col_dot(const Eigen::VectorXd& y, int j) const;
  Eigen::VectorXd ftran(int j) const;
  void recompute_basics();
  bool refactorize();
  double bound_violation(int var) const;
  double infeasibility_sum() const;
  bool residuals_ok() const;
  LpResult extract(LpStatus status, int iterations) const;
};

// Convenience wrappers for one-off relaxation solves.
LpResult solve_lp(const MilpInstance& inst);
LpResult solve_lp(const MilpInstance& inst, std::span<const double> lo,
                  std::span<const double> up);

}  // namespace pns
