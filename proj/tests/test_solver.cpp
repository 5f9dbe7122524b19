#include "pns/solver.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "pns/milp.hpp"
#include "pns/rng.hpp"

using namespace pns;

namespace {

MilpInstance binary_instance(std::vector<double> obj, std::vector<Row> rows) {
  MilpInstance inst;
  inst.name = "BIN";
  inst.num_vars = static_cast<int>(obj.size());
  inst.num_binary = inst.num_vars;
  inst.objective = std::move(obj);
  inst.rows = std::move(rows);
  inst.lower.assign(inst.num_vars, 0.0);
  inst.upper.assign(inst.num_vars, 1.0);
  inst.var_kind.assign(inst.num_vars, VarKind::kBinary);
  for (int j = 0; j < inst.num_vars; ++j) inst.var_names.push_back("x" + std::to_string(j));
  inst.validate();
  return inst;
}

// Maximum independent set on a triangle, in minimization form.
MilpInstance triangle() {
  return binary_instance({-1.0, -1.0, -1.0},
                         {Row{"E01", {{0, 1.0}, {1, 1.0}}, 1.0, RowSense::kLe},
                          Row{"E02", {{0, 1.0}, {2, 1.0}}, 1.0, RowSense::kLe},
                          Row{"E12", {{1, 1.0}, {2, 1.0}}, 1.0, RowSense::kLe}});
}

// Random feasible pure-binary instance: rhs values are anchored on a hidden
// 0/1 point so at least one assignment always satisfies every row.
MilpInstance random_instance(SplitMix64& rng, int n, int m) {
  std::vector<double> obj(n);
  for (double& c : obj) c = static_cast<double>(rng.bounded(21)) - 10.0;
  std::vector<int> hidden(n);
  for (int& z : hidden) z = rng.bounded(2) ? 1 : 0;
  std::vector<Row> rows;
  for (int i = 0; i < m; ++i) {
    Row row;
    row.name = "R" + std::to_string(i);
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.4) continue;
      const double c = static_cast<double>(rng.bounded(7)) - 3.0;
      if (c == 0.0) continue;
      row.coeffs[j] = c;
    }
    if (row.coeffs.empty()) row.coeffs[rng.bounded(n)] = 1.0;
    double act = 0.0;
    for (const auto& [j, c] : row.coeffs) act += c * hidden[j];
    const int kind = static_cast<int>(rng.bounded(3));
    if (kind == 0) {
      row.sense = RowSense::kLe;
      row.rhs = act + static_cast<double>(rng.bounded(3));
    } else if (kind == 1) {
      row.sense = RowSense::kGe;
      row.rhs = act - static_cast<double>(rng.bounded(3));
    } else {
      row.sense = RowSense::kEq;
      row.rhs = act;
    }
    rows.push_back(std::move(row));
  }
  return binary_instance(std::move(obj), std::move(rows));
}

}  // namespace

TEST_CASE("triangle independent set solves to -1") {
  SolveParams params;
  SolveResult res = solve_milp(triangle(), params);
  REQUIRE(res.status == SolveStatus::kOptimal);
  REQUIRE(res.incumbent.has_value());
  CHECK(res.incumbent->objective == -1.0);
  CHECK(res.incumbent->feasible);
  CHECK(res.incumbent->integral);
  CHECK(std::abs(res.incumbent->objective - res.bound) <=
        params.rel_gap_tol * (1.0 + std::abs(res.bound)));
}

TEST_CASE("brute force enumerates the triangle") {
  BruteForceResult res = brute_force(triangle());
  REQUIRE(res.feasible);
  CHECK(res.best.objective == -1.0);
  CHECK(res.num_optimal == 3);
  CHECK(res.num_feasible == 4);  // empty set and the three singletons
  CHECK(res.best.values == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("brute force handles the degenerate and error cases") {
  SUBCASE("q = 0") {
    MilpInstance inst = binary_instance({}, {});
    BruteForceResult res = brute_force(inst);
    CHECK(res.feasible);
    CHECK(res.best.objective == 0.0);
    CHECK(res.best.values.empty());
    CHECK(res.num_feasible == 1);
  }
  SUBCASE("infeasible pair of rows") {
    MilpInstance inst = binary_instance({1.0}, {Row{"LE", {{0, 1.0}}, 0.0, RowSense::kLe},
                                                Row{"GE", {{0, 1.0}}, 1.0, RowSense::kGe}});
    CHECK_FALSE(brute_force(inst).feasible);
    CHECK(solve_milp(inst, SolveParams{}).status == SolveStatus::kInfeasible);
  }
  SUBCASE("q too large") {
    MilpInstance inst;
    inst.num_vars = inst.num_binary = 25;
    inst.objective.assign(25, 0.0);
    inst.lower.assign(25, 0.0);
    inst.upper.assign(25, 1.0);
    inst.var_kind.assign(25, VarKind::kBinary);
    for (int j = 0; j < 25; ++j) inst.var_names.push_back("x" + std::to_string(j));
    CHECK_THROWS_AS(brute_force(inst), std::invalid_argument);
  }
  SUBCASE("continuous tail rejected") {
    MilpInstance inst = binary_instance({1.0, 1.0}, {});
    inst.num_binary = 1;
    inst.var_kind[1] = VarKind::kContinuous;
    CHECK_THROWS_AS(brute_force(inst), std::invalid_argument);
  }
}

TEST_CASE("integral LP relaxation closes at the root with zero nodes") {
  MilpInstance inst = binary_instance({-1.0, 2.0}, {Row{"C", {{0, 1.0}}, 1.0, RowSense::kLe}});
  SolveResult res = solve_milp(inst, SolveParams{});
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(res.incumbent->objective == -1.0);
  CHECK(res.stats.nodes == 0);
}

TEST_CASE("variables fixed to zero through bounds make covering rows infeasible") {
  MilpInstance inst = binary_instance({1.0, 1.0}, {Row{"C", {{0, 1.0}, {1, 1.0}}, 1.0, RowSense::kGe}});
  inst.upper = {0.0, 0.0};  // both binaries pinned off
  inst.validate();
  CHECK(solve_milp(inst, SolveParams{}).status == SolveStatus::kInfeasible);
}

TEST_CASE("unbounded continuous tail is reported") {
  MilpInstance inst;
  inst.num_vars = 2;
  inst.num_binary = 1;
  inst.objective = {0.0, -1.0};
  inst.lower = {0.0, 0.0};
  inst.upper = {1.0, kInf};
  inst.var_kind = {VarKind::kBinary, VarKind::kContinuous};
  inst.var_names = {"b", "y"};
  inst.rows = {Row{"C", {{0, 1.0}}, 1.0, RowSense::kLe}};
  inst.validate();
  CHECK(solve_milp(inst, SolveParams{}).status == SolveStatus::kUnbounded);
}

TEST_CASE("branch and bound matches brute force on random instances") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.bounded(10));  // up to 12 binaries
    const int m = 1 + static_cast<int>(rng.bounded(6));
    MilpInstance inst = random_instance(rng, n, m);
    BruteForceResult truth = brute_force(inst);
    SolveParams params;
    params.pool_size = 5;
    SolveResult res = solve_milp(inst, params);
    REQUIRE(truth.feasible);  // construction guarantees a feasible point
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(std::abs(res.incumbent->objective - truth.best.objective) <= 1e-6);
    // Dual bound never exceeds the incumbent.
    CHECK(res.bound <= res.incumbent->objective + 1e-9);
    // Pool: sorted, distinct binary keys, all genuinely feasible.
    const auto& entries = res.pool.entries();
    REQUIRE(!entries.empty());
    CHECK(entries.front().objective == res.incumbent->objective);
    std::set<std::vector<double>> keys;
    for (size_t i = 0; i < entries.size(); ++i) {
      CHECK(check_feasible(inst, entries[i].x, 1e-6));
      CHECK(std::abs(inst.objective_value(entries[i].x) - entries[i].objective) <= 1e-9);
      if (i > 0) CHECK(entries[i - 1].objective <= entries[i].objective);
      CHECK(keys.insert(entries[i].x).second);
    }
  }
}

TEST_CASE("solves are deterministic without a time limit") {
  SplitMix64 rng(77);
  MilpInstance inst = random_instance(rng, 14, 8);
  SolveParams params;
  params.pool_size = 4;
  SolveResult a = solve_milp(inst, params);
  SolveResult b = solve_milp(inst, params);
  REQUIRE(a.status == b.status);
  CHECK(a.stats.nodes == b.stats.nodes);
  CHECK(a.stats.lp_solves == b.stats.lp_solves);
  CHECK(a.bound == b.bound);
  if (a.incumbent) {
    CHECK(a.incumbent->values == b.incumbent->values);
    CHECK(a.incumbent->objective == b.incumbent->objective);
  }
  REQUIRE(a.pool.size() == b.pool.size());
  for (size_t i = 0; i < a.pool.size(); ++i) {
    CHECK(a.pool.entries()[i].x == b.pool.entries()[i].x);
  }
}

TEST_CASE("node limits stop the search with an honest status") {
  SplitMix64 rng(5150);
  MilpInstance inst = random_instance(rng, 16, 10);
  SolveParams params;
  params.node_limit = 1;
  params.enable_diving = false;
  SolveResult res = solve_milp(inst, params);
  if (res.status == SolveStatus::kFeasibleTimeLimit) {
    if (res.incumbent) CHECK(res.bound <= res.incumbent->objective + 1e-9);
  } else {
    CHECK(res.status == SolveStatus::kOptimal);
  }
  CHECK(res.stats.nodes <= 2);  // the pop that tripped the limit plus the check
}

TEST_CASE("incumbent events are recorded in improving order") {
  SplitMix64 rng(31);
  MilpInstance inst = random_instance(rng, 12, 6);
  SolveResult res = solve_milp(inst, SolveParams{});
  REQUIRE(res.status == SolveStatus::kOptimal);
  REQUIRE(!res.events.empty());
  for (size_t i = 1; i < res.events.size(); ++i) {
    CHECK(res.events[i].objective < res.events[i - 1].objective);
  }
  CHECK(res.events.back().objective == res.incumbent->objective);
}

TEST_CASE("pool capacity keeps only the best distinct solutions") {
  SolutionPool pool(2, 2);
  CHECK(pool.offer({1.0, 0.0, 0.25}, -1.0));
  CHECK_FALSE(pool.offer({1.0, 0.0, 0.25}, -1.0));  // duplicate key, same value
  CHECK(pool.offer({1.0, 0.0, 0.50}, -1.5));        // same key, better completion
  CHECK(pool.size() == 1);
  CHECK(pool.offer({0.0, 1.0, 0.0}, -0.5));
  CHECK(pool.offer({1.0, 1.0, 0.0}, -2.0));  // evicts the worst
  REQUIRE(pool.size() == 2);
  CHECK(pool.entries()[0].objective == -2.0);
  CHECK(pool.entries()[1].objective == -1.5);
  CHECK_FALSE(pool.offer({0.0, 0.0, 0.0}, 5.0));  // worse than everything kept
  CHECK(pool.size() == 2);
}

TEST_CASE("for_each_feasible visits exactly the feasible assignments") {
  int count = 0;
  double best = kInf;
  for_each_feasible(triangle(), [&](const std::vector<double>& x, double obj) {
    ++count;
    best = std::min(best, obj);
    CHECK(check_feasible(triangle(), x, 1e-6));
  });
  CHECK(count == 4);
  CHECK(best == -1.0);
}
