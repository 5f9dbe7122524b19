#include "pns/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "pns/simplex.hpp"

namespace pns {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// How far a value sits from its nearest integer; 0.5 is maximal.
double fractionality(double v) {
  const double f = v - std::floor(v);
  return std::min(f, 1.0 - f);
}

}  // namespace

void SolveParams::validate() const {
  if (pool_size < 1) throw std::invalid_argument("pool_size must be >= 1");
  if (rel_gap_tol <= 0 || int_tol <= 0) throw std::invalid_argument("tolerances must be positive");
  if (time_limit <= 0) throw std::invalid_argument("time_limit must be positive");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasibleTimeLimit: return "feasible_time_limit";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumerics: return "numerics";
  }
  return "unknown";
}

SolutionPool::SolutionPool(int capacity, int num_binary)
    : capacity_(capacity), num_binary_(num_binary) {}

std::vector<uint8_t> SolutionPool::key_of(const std::vector<double>& x) const {
  std::vector<uint8_t> key(num_binary_);
  for (int d = 0; d < num_binary_; ++d) key[d] = x[d] > 0.5 ? 1 : 0;
  return key;
}

bool SolutionPool::offer(const std::vector<double>& x, double objective) {
  if (capacity_ <= 0) return false;
  const std::vector<uint8_t> key = key_of(x);
  for (PoolEntry& e : entries_) {
    if (key_of(e.x) == key) {
      // Same binary choice; keep the better continuous completion.
      if (objective < e.objective) {
        e.x = x;
        e.objective = objective;
        std::sort(entries_.begin(), entries_.end(), [this](const PoolEntry& a, const PoolEntry& b) {
          if (a.objective != b.objective) return a.objective < b.objective;
          return key_of(a.x) < key_of(b.x);
        });
        return true;
      }
      return false;
    }
  }
  PoolEntry entry{x, objective};
  auto before = [this](const PoolEntry& a, const PoolEntry& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    return key_of(a.x) < key_of(b.x);
  };
  if (static_cast<int>(entries_.size()) >= capacity_ && !before(entry, entries_.back())) {
    return false;  // full and not better than the current worst
  }
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry, before);
  entries_.insert(pos, std::move(entry));
  if (static_cast<int>(entries_.size()) > capacity_) entries_.pop_back();
  return true;
}

double SolveResult::gap_to_bound() const {
  if (!incumbent) return kInf;
  return std::abs(incumbent->objective - bound);
}

namespace {

struct Node {
  std::vector<std::pair<int, int>> fixings;  // (binary index, value)
  double bound;
  int64_t seq;  // FIFO tie-break under equal bounds
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;                              // then oldest first
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpInstance& inst, const SolveParams& params)
      : inst_(inst), params_(params), solver_(inst), pool_(params.pool_size, inst.num_binary) {
    lo_.assign(inst.lower.begin(), inst.lower.end());
    up_.assign(inst.upper.begin(), inst.upper.end());
  }

  SolveResult run() {
    t0_ = Clock::now();
    result_.pool = pool_;

    LpResult root = solve_node({});
    if (root.status == LpStatus::kInfeasible) return finish(SolveStatus::kInfeasible, kInf);
    if (root.status == LpStatus::kUnbounded) return finish(SolveStatus::kUnbounded, -kInf);
    if (root.status == LpStatus::kNumerics) return finish(SolveStatus::kNumerics, -kInf);

    process(Node{{}, root.objective, 0}, root);

    while (!open_.empty()) {
      if (out_of_budget()) {
        const double open_bound = open_.top().bound;
        return finish(SolveStatus::kFeasibleTimeLimit, std::min(open_bound, incumbent_obj()));
      }
      Node node = open_.top();
      open_.pop();
      ++result_.stats.nodes;
      if (node.bound >= cutoff()) continue;  // pruned by a newer incumbent

      LpResult lp = solve_node(node.fixings);
      if (lp.status == LpStatus::kInfeasible) continue;
      if (lp.status == LpStatus::kUnbounded) return finish(SolveStatus::kUnbounded, -kInf);
      if (lp.status == LpStatus::kNumerics) {
        return finish(SolveStatus::kNumerics, std::min(node.bound, incumbent_obj()));
      }
      node.bound = std::max(node.bound, lp.objective);
      if (node.bound >= cutoff()) continue;
      process(node, lp);
    }
    // Tree exhausted: the incumbent (if any) is proven optimal.
    if (!incumbent_) return finish(SolveStatus::kInfeasible, kInf);
    return finish(SolveStatus::kOptimal, incumbent_->objective);
  }

 private:
  const MilpInstance& inst_;
  const SolveParams& params_;
  SimplexSolver solver_;
  SolutionPool pool_;
  SolveResult result_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  std::vector<double> lo_, up_;
  std::optional<Solution> incumbent_;
  int64_t seq_ = 0;
  Clock::time_point t0_;

  double incumbent_obj() const { return incumbent_ ? incumbent_->objective : kInf; }

  // A node whose bound reaches this value cannot strictly improve.
  double cutoff() const {
    if (!incumbent_) return kInf;
    return incumbent_->objective - 1e-9 * (1.0 + std::abs(incumbent_->objective));
  }

  bool out_of_budget() {
    if (params_.node_limit >= 0 && result_.stats.nodes >= params_.node_limit) return true;
    if (params_.time_limit < kInf && seconds_since(t0_) >= params_.time_limit) return true;
    return false;
  }

  LpResult solve_node(const std::vector<std::pair<int, int>>& fixings) {
    for (const auto& [j, v] : fixings) lo_[j] = up_[j] = v;
    LpResult res = solver_.solve(lo_, up_);
    if (res.status == LpStatus::kNumerics) {
      // One cold retry before giving up on the node.
      solver_.reset();
      res = solver_.solve(lo_, up_);
    }
    for (const auto& [j, v] : fixings) {
      lo_[j] = inst_.lower[j];
      up_[j] = inst_.upper[j];
    }
    ++result_.stats.lp_solves;
    result_.stats.lp_iterations += res.iterations;
    return res;
  }

  // Branch index by largest distance to integer, lowest index on ties.
  int most_fractional(const LpResult& lp) const {
    int best = -1;
    double best_frac = params_.int_tol;
    for (int d = 0; d < inst_.num_binary; ++d) {
      const double f = fractionality(lp.x[d]);
      if (f > best_frac + 1e-15) {
        best_frac = f;
        best = d;
      }
    }
    return best;
  }

  // Rounds the binaries of an LP point and accepts it as an incumbent
  // candidate when genuinely feasible.
  void try_integral(const std::vector<double>& x) {
    std::vector<double> snapped = x;
    for (int d = 0; d < inst_.num_binary; ++d) snapped[d] = snapped[d] > 0.5 ? 1.0 : 0.0;
    if (!check_feasible(inst_, snapped, kDefaultFeasTol)) return;
    const double obj = inst_.objective_value(snapped);
    pool_.offer(snapped, obj);
    if (obj < incumbent_obj()) {
      incumbent_ = make_solution(inst_, std::move(snapped), kDefaultFeasTol);
      result_.events.push_back({seconds_since(t0_), result_.stats.nodes, obj});
    }
  }

  // One depth-first dive: repeatedly fix the least-fractional binary to its
  // nearest value and re-solve, until an integral leaf, infeasibility or the
  // LP budget. Purely primal; never adds open nodes.
  void dive(const Node& from, const LpResult& start) {
    ++result_.stats.dives;
    std::vector<std::pair<int, int>> fixings = from.fixings;
    std::vector<bool> fixed(inst_.num_binary, false);
    for (const auto& [j, v] : fixings) fixed[j] = true;
    LpResult lp = start;
    for (int solves = 0; solves < params_.dive_lp_limit; ++solves) {
      // Pin everything already integral, then the least-fractional leftover.
      int pick = -1;
      double pick_frac = 2.0;
      for (int d = 0; d < inst_.num_binary; ++d) {
        if (fixed[d]) continue;
        const double f = fractionality(lp.x[d]);
        if (f <= params_.int_tol) {
          fixings.push_back({d, lp.x[d] > 0.5 ? 1 : 0});
          fixed[d] = true;
        } else if (f < pick_frac - 1e-15) {
          pick_frac = f;
          pick = d;
        }
      }
      if (pick < 0) {
        try_integral(lp.x);
        return;
      }
      fixings.push_back({pick, lp.x[pick] > 0.5 ? 1 : 0});
      fixed[pick] = true;
      lp = solve_node(fixings);
      if (lp.status != LpStatus::kOptimal) return;
      if (lp.objective >= cutoff()) return;  // dive can no longer improve
    }
  }

  void process(const Node& node, const LpResult& lp) {
    const int branch_var = most_fractional(lp);
    if (branch_var < 0) {
      try_integral(lp.x);
      return;
    }
    for (int v = 0; v <= 1; ++v) {
      Node child;
      child.fixings = node.fixings;
      child.fixings.push_back({branch_var, v});
      child.bound = std::max(node.bound, lp.objective);
      child.seq = ++seq_;
      open_.push(std::move(child));
    }
    if (params_.enable_diving && !out_of_budget()) dive(node, lp);
  }

  SolveResult finish(SolveStatus status, double bound) {
    result_.status = status;
    result_.incumbent = incumbent_;
    result_.bound = bound;
    result_.pool = pool_;
    result_.stats.wall_seconds = seconds_since(t0_);
    if (status == SolveStatus::kFeasibleTimeLimit && incumbent_) {
      // Budget stop with a proven-optimal incumbent still counts as optimal.
      const double gap = incumbent_->objective - bound;
      if (gap <= params_.rel_gap_tol * (1.0 + std::abs(bound))) result_.status = SolveStatus::kOptimal;
    }
    return result_;
  }
};

}  // namespace

SolveResult solve_milp(const MilpInstance& inst, const SolveParams& params) {
  inst.validate();
  params.validate();
  BranchAndBound bnb(inst, params);
  return bnb.run();
}

namespace {

// Shared Gray-code walk. Calls visit(x, objective, feasible) for all 2^q
// assignments; x mutates in place between calls.
template <typename Visit>
void gray_walk(const MilpInstance& inst, Visit&& visit) {
  if (!inst.pure_binary()) {
    throw std::invalid_argument("brute force requires a pure binary instance");
  }
  if (inst.num_binary > 24) {
    throw std::invalid_argument("brute force limited to q <= 24, got " +
                                std::to_string(inst.num_binary));
  }
  const int q = inst.num_binary;
  const int m = inst.num_rows();

  // Row-major adjacency for incremental activity updates.
  std::vector<std::vector<std::pair<int, double>>> var_rows(q);
  std::vector<double> activity(m, 0.0);
  std::vector<bool> violated(m, false);
  int num_violated = 0;
  for (int i = 0; i < m; ++i) {
    for (const auto& [j, c] : inst.rows[i].coeffs) var_rows[j].push_back({i, c});
  }
  auto refresh_row = [&](int i) {
    const Row& row = inst.rows[i];
    bool bad = false;
    switch (row.sense) {
      case RowSense::kLe: bad = activity[i] > row.rhs + kDefaultFeasTol; break;
      case RowSense::kGe: bad = activity[i] < row.rhs - kDefaultFeasTol; break;
      case RowSense::kEq: bad = std::abs(activity[i] - row.rhs) > kDefaultFeasTol; break;
    }
    if (bad != violated[i]) {
      violated[i] = bad;
      num_violated += bad ? 1 : -1;
    }
  };
  for (int i = 0; i < m; ++i) refresh_row(i);

  std::vector<double> x(q, 0.0);
  // Bound-fixed binaries (l=u) restrict the walk to free coordinates.
  std::vector<int> free_idx;
  for (int d = 0; d < q; ++d) {
    if (inst.lower[d] == inst.upper[d]) {
      if (inst.lower[d] == 1.0) {
        x[d] = 1.0;
        for (const auto& [i, c] : var_rows[d]) {
          activity[i] += c;
          refresh_row(i);
        }
      }
    } else {
      free_idx.push_back(d);
    }
  }
  double obj = inst.objective_value(x);

  visit(x, obj, num_violated == 0);
  const int qf = static_cast<int>(free_idx.size());
  const uint64_t count = 1ull << qf;
  for (uint64_t k = 1; k < count; ++k) {
    const int bit = __builtin_ctzll(k);
    const int d = free_idx[bit];
    const double delta = x[d] > 0.5 ? -1.0 : 1.0;
    x[d] += delta;
    obj += delta * inst.objective[d];
    for (const auto& [i, c] : var_rows[d]) {
      activity[i] += delta * c;
      refresh_row(i);
    }
    visit(x, obj, num_violated == 0);
  }
}

}  // namespace

BruteForceResult brute_force(const MilpInstance& inst) {
  inst.validate();
  BruteForceResult res;
  double best = kInf;
  std::vector<double> best_x;
  gray_walk(inst, [&](const std::vector<double>& x, double obj, bool feasible) {
    if (!feasible) return;
    ++res.num_feasible;
    if (best == kInf) {
      best = inst.objective_value(x);
      best_x = x;
      res.num_optimal = 1;
      return;
    }
    // Incremental objectives can drift; settle candidates exactly.
    const double tol = 1e-9 * (1.0 + std::abs(best));
    if (obj > best + tol) return;
    const double exact = inst.objective_value(x);
    if (exact < best - 1e-9 * (1.0 + std::abs(best))) {
      best = exact;
      best_x = x;
      res.num_optimal = 1;
    } else if (std::abs(exact - best) <= 1e-9 * (1.0 + std::abs(best))) {
      ++res.num_optimal;
    }
  });
  if (res.num_feasible == 0) return res;
  res.feasible = true;
  res.best = make_solution(inst, std::move(best_x), kDefaultFeasTol);
  return res;
}

void for_each_feasible(const MilpInstance& inst,
                       const std::function<void(const std::vector<double>&, double)>& fn) {
  inst.validate();
  gray_walk(inst, [&](const std::vector<double>& x, double obj, bool feasible) {
    if (feasible) fn(x, inst.objective_value(x));
    (void)obj;
  });
}

}  // namespace pns
