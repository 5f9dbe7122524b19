#include "pns/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pns {

namespace {
constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDegenStep = 1e-11;
constexpr int kRefactorInterval = 128;
constexpr double kHuge = std::numeric_limits<double>::infinity();
}  // namespace

SimplexSolver::SimplexSolver(const MilpInstance& inst) {
  n_ = inst.num_vars;
  m_ = inst.num_rows();
  total_ = n_ + m_;
  cols_.assign(n_, {});
  rhs_.resize(m_);
  cost_.assign(total_, 0.0);
  lo_.assign(total_, 0.0);
  up_.assign(total_, 0.0);
  for (int j = 0; j < n_; ++j) cost_[j] = inst.objective[j];
  for (int i = 0; i < m_; ++i) {
    const Row& row = inst.rows[i];
    rhs_[i] = row.rhs;
    for (const auto& [j, coeff] : row.coeffs) cols_[j].push_back({i, coeff});
    // Slack bounds encode the row sense: a.x + s = b.
    const int s = n_ + i;
    switch (row.sense) {
      case RowSense::kLe:
        lo_[s] = 0.0;
        up_[s] = kHuge;
        break;
      case RowSense::kGe:
        lo_[s] = -kHuge;
        up_[s] = 0.0;
        break;
      case RowSense::kEq:
        lo_[s] = 0.0;
        up_[s] = 0.0;
        break;
    }
  }
  for (int j = 0; j < n_; ++j) {
    lo_[j] = inst.lower[j];
    up_[j] = inst.upper[j];
  }
  reset();
}

void SimplexSolver::reset() {
  binv_ = Eigen::MatrixXd::Identity(m_, m_);
  basic_.resize(m_);
  basic_row_of_.assign(total_, -1);
  state_.assign(total_, kAtLower);
  xval_.assign(total_, 0.0);
  for (int i = 0; i < m_; ++i) {
    basic_[i] = n_ + i;
    basic_row_of_[n_ + i] = i;
    state_[n_ + i] = kBasic;
  }
  pivots_since_refactor_ = 0;
  degenerate_pivots_ = 0;
}

double SimplexSolver::col_dot(const Eigen::VectorXd& y, int j) const {
  if (j >= n_) return y[j - n_];
  double v = 0.0;
  for (const auto& [row, coeff] : cols_[j]) v += coeff * y[row];
  return v;
}

Eigen::VectorXd SimplexSolver::ftran(int j) const {
  if (j >= n_) return binv_.col(j - n_);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m_);
  for (const auto& [row, coeff] : cols_[j]) d.noalias() += coeff * binv_.col(row);
  return d;
}

void SimplexSolver::recompute_basics() {
  Eigen::VectorXd r = rhs_;
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == kBasic || xval_[j] == 0.0) continue;
    if (j >= n_) {
      r[j - n_] -= xval_[j];
    } else {
      for (const auto& [row, coeff] : cols_[j]) r[row] -= coeff * xval_[j];
    }
  }
  const Eigen::VectorXd xb = binv_ * r;
  for (int i = 0; i < m_; ++i) xval_[basic_[i]] = xb[i];
}

bool SimplexSolver::refactorize() {
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) {
    const int j = basic_[i];
    if (j >= n_) {
      basis(j - n_, i) = 1.0;
    } else {
      for (const auto& [row, coeff] : cols_[j]) basis(row, i) = coeff;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
  if (!lu.isInvertible()) return false;
  binv_ = lu.inverse();
  pivots_since_refactor_ = 0;
  return true;
}

double SimplexSolver::bound_violation(int var) const {
  const double x = xval_[var];
  if (x < lo_[var]) return lo_[var] - x;
  if (x > up_[var]) return x - up_[var];
  return 0.0;
}

double SimplexSolver::infeasibility_sum() const {
  double s = 0.0;
  for (int i = 0; i < m_; ++i) s += bound_violation(basic_[i]);
  return s;
}

bool SimplexSolver::residuals_ok() const {
  Eigen::VectorXd act = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < n_; ++j) {
    if (xval_[j] == 0.0) continue;
    for (const auto& [row, coeff] : cols_[j]) act[row] += coeff * xval_[j];
  }
  for (int i = 0; i < m_; ++i) act[i] += xval_[n_ + i];
  for (int i = 0; i < m_; ++i) {
    if (std::abs(act[i] - rhs_[i]) > 1e-7 * (1.0 + std::abs(rhs_[i]))) return false;
  }
  for (int i = 0; i < m_; ++i) {
    const int j = basic_[i];
    if (bound_violation(j) > 1e-7 * (1.0 + std::abs(xval_[j]))) return false;
  }
  return true;
}

LpResult SimplexSolver::extract(LpStatus status, int iterations) const {
  LpResult res;
  res.status = status;
  res.iterations = iterations;
  if (status == LpStatus::kOptimal) {
    res.x.assign(xval_.begin(), xval_.begin() + n_);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * res.x[j];
    res.objective = obj;
  }
  return res;
}

LpResult SimplexSolver::solve() {
  std::vector<double> lo(lo_.begin(), lo_.begin() + n_);
  std::vector<double> up(up_.begin(), up_.begin() + n_);
  return solve(lo, up);
}

LpResult SimplexSolver::solve(std::span<const double> lo, std::span<const double> up) {
  for (int j = 0; j < n_; ++j) {
    lo_[j] = lo[j] <= -kInf ? -kHuge : lo[j];
    up_[j] = up[j] >= kInf ? kHuge : up[j];
  }

  // Re-seat nonbasic variables on valid bounds for the new box.
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == kBasic) continue;
    const bool lo_fin = std::isfinite(lo_[j]);
    const bool up_fin = std::isfinite(up_[j]);
    State s = state_[j];
    if (s == kAtLower && !lo_fin) s = up_fin ? kAtUpper : kFreeNonbasic;
    if (s == kAtUpper && !up_fin) s = lo_fin ? kAtLower : kFreeNonbasic;
    if (s == kFreeNonbasic && (lo_fin || up_fin)) s = lo_fin ? kAtLower : kAtUpper;
    state_[j] = s;
    xval_[j] = s == kAtLower ? lo_[j] : s == kAtUpper ? up_[j] : 0.0;
  }
  recompute_basics();

  const int max_iters = 50000 + 200 * total_;
  const int bland_threshold = 2 * total_;
  int iters = 0;
  degenerate_pivots_ = 0;

  // One pricing + ratio-test + pivot step. Returns kStuck when no entering
  // candidate exists for the current (phase-dependent) pricing vector.
  auto step = [&](bool phase_one) -> StepOutcome {
    Eigen::VectorXd y;
    if (phase_one) {
      Eigen::VectorXd sigma = Eigen::VectorXd::Zero(m_);
      bool any = false;
      for (int i = 0; i < m_; ++i) {
        const int j = basic_[i];
        if (xval_[j] > up_[j] + kFeasTol * (1.0 + std::abs(up_[j]))) {
          sigma[i] = 1.0;
          any = true;
        } else if (xval_[j] < lo_[j] - kFeasTol * (1.0 + std::abs(lo_[j]))) {
          sigma[i] = -1.0;
          any = true;
        }
      }
      if (!any) return StepOutcome::kStuck;  // feasible: phase 1 done
      y = binv_.transpose() * sigma;
    } else {
      Eigen::VectorXd cb(m_);
      for (int i = 0; i < m_; ++i) cb[i] = cost_[basic_[i]];
      y = binv_.transpose() * cb;
    }

    const bool bland = degenerate_pivots_ > bland_threshold;
    int enter = -1, dir = 0;
    double best_merit = phase_one ? kDualTol : kDualTol;
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == kBasic || lo_[j] == up_[j]) continue;
      // Phase 1 prices the violation gradient, phase 2 the reduced cost.
      const double w = phase_one ? col_dot(y, j) : cost_[j] - col_dot(y, j);
      int d = 0;
      if (phase_one) {
        if (state_[j] == kAtLower && w > kDualTol) d = 1;
        else if (state_[j] == kAtUpper && w < -kDualTol) d = -1;
        else if (state_[j] == kFreeNonbasic && std::abs(w) > kDualTol) d = w > 0 ? 1 : -1;
      } else {
        if (state_[j] == kAtLower && w < -kDualTol) d = 1;
        else if (state_[j] == kAtUpper && w > kDualTol) d = -1;
        else if (state_[j] == kFreeNonbasic && std::abs(w) > kDualTol) d = w < 0 ? 1 : -1;
      }
      if (d == 0) continue;
      if (bland) {
        enter = j;
        dir = d;
        break;
      }
      if (std::abs(w) > best_merit) {
        best_merit = std::abs(w);
        enter = j;
        dir = d;
      }
    }
    if (enter < 0) return StepOutcome::kStuck;

    const Eigen::VectorXd d = ftran(enter);

    // Ratio test. delta is the (nonnegative) movement of the entering
    // variable along dir; basic r moves at rate -dir*d[r].
    double best_delta = kHuge;
    int leave_row = -1;
    double leave_bound = 0.0;
    double best_pivot = 0.0;
    const double span = up_[enter] - lo_[enter];
    const bool flip_possible = std::isfinite(span);
    if (flip_possible) best_delta = span;
    for (int i = 0; i < m_; ++i) {
      if (std::abs(d[i]) <= kPivotTol) continue;
      const int j = basic_[i];
      const double rate = -dir * d[i];
      const double x = xval_[j];
      double target = kHuge;
      if (x < lo_[j] - kFeasTol) {
        if (rate > 0) target = lo_[j];  // infeasible rising toward its lower bound
      } else if (x > up_[j] + kFeasTol) {
        if (rate < 0) target = up_[j];
      } else if (rate > 0) {
        target = up_[j];
      } else {
        target = lo_[j];
      }
      if (!std::isfinite(target)) continue;
      double delta = (target - x) / rate;
      if (delta < 0.0) delta = 0.0;  // roundoff guard
      const bool better = delta < best_delta - 1e-12;
      const bool tied = !better && delta <= best_delta + 1e-12 && leave_row >= 0;
      if (better || (tied && (degenerate_pivots_ > bland_threshold
                                  ? j < basic_[leave_row]
                                  : std::abs(d[i]) > best_pivot))) {
        best_delta = delta;
        leave_row = i;
        leave_bound = target;
        best_pivot = std::abs(d[i]);
      }
    }

    if (!std::isfinite(best_delta)) {
      return phase_one ? StepOutcome::kNumerics : StepOutcome::kUnbounded;
    }
    if (best_delta <= kDegenStep) {
      ++degenerate_pivots_;
    } else {
      degenerate_pivots_ = 0;
    }

    // Apply the move to the basic values and the entering variable.
    for (int i = 0; i < m_; ++i) {
      if (d[i] != 0.0) xval_[basic_[i]] -= best_delta * dir * d[i];
    }
    if (leave_row < 0) {
      // Bound flip: no basis change.
      xval_[enter] = dir > 0 ? up_[enter] : lo_[enter];
      state_[enter] = dir > 0 ? kAtUpper : kAtLower;
      return StepOutcome::kProgress;
    }

    const int leaving = basic_[leave_row];
    xval_[enter] = (state_[enter] == kAtLower   ? lo_[enter]
                    : state_[enter] == kAtUpper ? up_[enter]
                                                : 0.0) +
                   dir * best_delta;
    xval_[leaving] = leave_bound;
    state_[leaving] = leave_bound == lo_[leaving] ? kAtLower : kAtUpper;
    basic_row_of_[leaving] = -1;
    basic_[leave_row] = enter;
    basic_row_of_[enter] = leave_row;
    state_[enter] = kBasic;

    const Eigen::RowVectorXd pivot_row = binv_.row(leave_row) / d[leave_row];
    binv_.noalias() -= d * pivot_row;
    binv_.row(leave_row) = pivot_row;

    if (++pivots_since_refactor_ >= kRefactorInterval) {
      if (!refactorize()) return StepOutcome::kNumerics;
      recompute_basics();
    }
    return StepOutcome::kProgress;
  };

  for (int attempt = 0; attempt < 4; ++attempt) {
    // Phase 1: drive the basic bound violations to zero.
    for (;;) {
      if (iters++ > max_iters) return extract(LpStatus::kNumerics, iters);
      const StepOutcome out = step(true);
      if (out == StepOutcome::kProgress) continue;
      if (out == StepOutcome::kNumerics || out == StepOutcome::kUnbounded) {
        return extract(LpStatus::kNumerics, iters);
      }
      break;  // kStuck: either feasible or locally optimal infeasibility
    }
    if (infeasibility_sum() > 1e-7) {
      // Certify infeasibility against a fresh factorization.
      if (!refactorize()) return extract(LpStatus::kNumerics, iters);
      recompute_basics();
      if (infeasibility_sum() > 1e-7 && step(true) == StepOutcome::kStuck) {
        return extract(LpStatus::kInfeasible, iters);
      }
      continue;
    }

    // Phase 2: optimize.
    for (;;) {
      if (iters++ > max_iters) return extract(LpStatus::kNumerics, iters);
      const StepOutcome out = step(false);
      if (out == StepOutcome::kProgress) {
        if (infeasibility_sum() > 1e-6) break;  // drift; rerun phase 1
        continue;
      }
      if (out == StepOutcome::kNumerics) return extract(LpStatus::kNumerics, iters);
      if (out == StepOutcome::kUnbounded) {
        total_iterations_ += iters;
        return extract(LpStatus::kUnbounded, iters);
      }
      // kStuck: optimal for the current factorization; verify before returning.
      if (!residuals_ok()) {
        if (!refactorize()) return extract(LpStatus::kNumerics, iters);
        recompute_basics();
        break;  // re-run both phases on clean numbers
      }
      total_iterations_ += iters;
      return extract(LpStatus::kOptimal, iters);
    }
  }
  return extract(LpStatus::kNumerics, iters);
}

LpResult solve_lp(const MilpInstance& inst) {
  SimplexSolver solver(inst);
  return solver.solve();
}

LpResult solve_lp(const MilpInstance& inst, std::span<const double> lo,
                  std::span<const double> up) {
  SimplexSolver solver(inst);
  return solver.solve(lo, up);
}

}  // namespace pns
