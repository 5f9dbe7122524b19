#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pns/milp.hpp"

namespace pns {

struct SolveParams {
  double time_limit = kInf;  // seconds; kInf disables the clock entirely
  int pool_size = 10;
  double rel_gap_tol = 1e-6;
  double int_tol = 1e-6;
  int64_t node_limit = -1;  // negative: unlimited
  uint64_t seed = 0;
  bool enable_diving = true;
  int dive_lp_limit = 30;  // LP solves allowed per dive

  void validate() const;
};

enum class SolveStatus {
  kOptimal,
  kFeasibleTimeLimit,  // stopped on a time or node budget
  kInfeasible,
  kUnbounded,
  kNumerics,  // LP engine gave up; reported rather than guessed
};

std::string to_string(SolveStatus s);

struct PoolEntry {
  std::vector<double> x;
  double objective = 0.0;
};

// Keeps the best `capacity` feasible integral solutions seen, distinct on
// the binary subvector, sorted by objective ascending (ties: binary vector
// lexicographically).
class SolutionPool {
 public:
  SolutionPool() = default;
  SolutionPool(int capacity, int num_binary);

  // Returns true when the solution enters (or updates) the pool.
  bool offer(const std::vector<double>& x, double objective);

  const std::vector<PoolEntry>& entries() const { return entries_; }
  int capacity() const { return capacity_; }
  int num_binary() const { return num_binary_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

 private:
  int capacity_ = 0;
  int num_binary_ = 0;
  std::vector<PoolEntry> entries_;

  std::vector<uint8_t> key_of(const std::vector<double>& x) const;
};

struct IncumbentEvent {
  double seconds = 0.0;
  int64_t nodes = 0;
  double objective = 0.0;
};

struct SolveStats {
  int64_t nodes = 0;       // nodes popped from the open queue
  int64_t lp_solves = 0;   // node + dive LP solves
  int64_t lp_iterations = 0;
  int64_t dives = 0;
  double wall_seconds = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Solution> incumbent;
  double bound = kInf;  // best dual (lower) bound in minimization form
  SolutionPool pool;
  SolveStats stats;
  std::vector<IncumbentEvent> events;  // one entry per incumbent improvement

  double gap_to_bound() const;
};

// Branch-and-bound over the binary variables with best-bound node selection,
// most-fractional branching and one primal dive per branched node.
SolveResult solve_milp(const MilpInstance& inst, const SolveParams& params);

struct BruteForceResult {
  bool feasible = false;
  Solution best;
  int64_t num_optimal = 0;   // assignments attaining the best objective
  int64_t num_feasible = 0;  // feasible assignments in total
};

// Exhaustive Gray-code enumeration over all 2^q assignments. Requires a pure
// binary instance with q <= 24. The reported solution is the first optimum
// in Gray-code visiting order.
BruteForceResult brute_force(const MilpInstance& inst);

// Calls fn(x, objective) for every feasible assignment, in Gray-code order.
// Same preconditions as brute_force.
void for_each_feasible(const MilpInstance& inst,
                       const std::function<void(const std::vector<double>&, double)>& fn);

}  // namespace pns
