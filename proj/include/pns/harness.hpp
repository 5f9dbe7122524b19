#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pns/gnn.hpp"
#include "pns/labels.hpp"
#include "pns/milp.hpp"
#include "pns/search.hpp"
#include "pns/solver.hpp"

namespace pns {

// Primal gap metrics. Objective and reference share one sense; both gaps are
// symmetric in sign conventions since only |OBJ - BKS| enters.
double gap_abs(double obj, double bks);
double gap_rel(double obj, double bks);  // guarded by |BKS| + 1e-10

// Relative improvement of gap_ours over gap_base, in percent. A zero
// baseline with a nonzero gap has no meaningful ratio and returns -infinity;
// callers must treat that as "undefined" rather than a percentage.
double gain_percent(double gap_base, double gap_ours);

// One method applied to one instance. Objectives are stored in the sense the
// instance was originally stated in; curve objectives likewise. A record
// without an incumbent keeps obj/gap_abs as NaN and gap_rel at the sentinel
// value 1.0 so budget failures still count against a method's average.
struct EvalRecord {
  std::string instance_id;
  std::string method;
  std::string status;
  bool has_incumbent = false;
  double obj = 0.0;
  double bks = 0.0;
  double gap_abs_val = 0.0;
  double gap_rel_val = 1.0;
  double wall_seconds = 0.0;
  std::vector<IncumbentEvent> curve;  // objective converted to original sense
};

// Long solves that define the reference objective per instance id, reported
// in each instance's original sense. Instances with no feasible point inside
// the budget are listed in `excluded` and skipped by evaluate().
struct BksResult {
  std::map<std::string, double> bks;
  std::vector<std::string> excluded;
};

BksResult compute_bks(const std::vector<MilpInstance>& instances, double long_limit = 60.0,
                      const SolveParams& base = SolveParams{});

struct EvalMethod {
  enum class Kind { kSolve, kSearch };
  std::string tag;
  Kind kind = Kind::kSolve;
  SearchConfig config;  // used by kSearch; config.mode distinguishes fixing
};

struct EvalSpec {
  std::vector<MilpInstance> instances;
  std::vector<EvalMethod> methods;
  const GnnModel* model = nullptr;  // required when any method is kSearch
  double time_limit = 10.0;         // per method solve
  double bks_limit = 60.0;
  SolveParams solver;  // base parameters for every solve
};

struct MethodAggregate {
  std::string method;
  int instances = 0;       // records contributing to avg_gap_rel
  int with_incumbent = 0;  // records contributing to avg_obj / avg_gap_abs
  double avg_obj = 0.0;
  double avg_gap_abs = 0.0;
  double avg_gap_rel = 0.0;
  double gain_vs_baseline = 0.0;  // on avg_gap_abs, first method as baseline
};

struct EvalReport {
  std::vector<EvalRecord> records;
  std::vector<MethodAggregate> aggregates;
  BksResult bks;
  std::vector<std::string> warnings;
};

// Runs every method on every instance, updates each BKS with the best
// objective any method found, then recomputes all gaps against the updated
// references. Deterministic given seeds and node budgets.
EvalReport evaluate(const EvalSpec& spec);

// CSV emitters. include_times=false strips wall-clock columns and switches
// the anytime axis from seconds to node counts so reruns are byte-identical.
std::string records_to_csv(const std::vector<EvalRecord>& records, bool include_times = true);
std::string aggregates_to_csv(const std::vector<MethodAggregate>& aggregates);
// Per-method mean relative gap over time, sampled at the union of incumbent
// event times. Before its first incumbent an instance contributes
// max(1.0, its first achieved gap_rel), which keeps the mean non-increasing.
std::string curves_to_csv(const std::vector<EvalRecord>& records, bool include_times = true);
// Plain-text aggregate table for terminal reports.
std::string report_text(const EvalReport& report);

struct PerturbParams {
  int trials = 50;
  int flips = 0;
  uint64_t seed = 0;
  // Negative: pin the full binary vector. Otherwise the perturbed vector is
  // treated as a prediction and only a (k0, k1) selection is pinned.
  int k0 = -1;
  int k1 = -1;
  SolveParams solver;
};

struct PerturbResult {
  int trials = 0;
  int feasible_trials = 0;
  double infeasible_pct = 0.0;
  // Absolute gaps to the true optimum over feasible trials; zeros when no
  // trial was feasible (feasible_trials tells the two cases apart).
  double gap_min = 0.0;
  double gap_avg = 0.0;
  double gap_max = 0.0;
};

// Solves inst to optimality, then `trials` times flips `flips` distinct
// random binary components of the optimum, pins the selection, and resolves.
PerturbResult perturb_experiment(const MilpInstance& inst, const PerturbParams& params);

std::string perturb_to_csv(const std::vector<std::pair<int, PerturbResult>>& by_flips);

// Solves the instance, converts its solution pool into marginal targets at
// the given temperature, and pairs them with the featurized graph. Throws
// when the budget yields no feasible solution.
TrainSample collect_training_sample(const MilpInstance& inst, const SolveParams& params,
                                    double temperature = 1.0);

// Full solver result as JSON: status, objective in the original sense, the
// bound, incumbent values, pool, stats and incumbent events. Wall-clock
// fields are omitted when include_times is false.
nlohmann::json solve_result_to_json(const MilpInstance& inst, const SolveResult& result,
                                    bool include_times = true);

// File plumbing shared by the CLI and the acceptance runner.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
MilpInstance read_instance_file(const std::string& path);
// Loads every instance listed in <dir>/manifest.json, in manifest order.
std::vector<MilpInstance> read_dataset_dir(const std::string& dir);

}  // namespace pns
