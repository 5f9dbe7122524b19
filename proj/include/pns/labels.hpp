#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "pns/milp.hpp"
#include "pns/solver.hpp"

namespace pns {

// Training target for one instance: energy weights over the pool entries and
// the per-binary marginal probability of being 1 under those weights.
struct LabeledSample {
  int q = 0;
  std::vector<double> objectives;  // pool objectives, minimization form
  std::vector<double> weights;     // softmax of -objective/temperature
  std::vector<double> marginals;   // size q, each in [0,1]
  double bks_objective = kInf;     // best pool objective
  double temperature = 1.0;
};

// w_j proportional to exp(-objective_j / temperature), computed with a
// log-sum-exp shift. Lower objective always means strictly larger weight.
std::vector<double> solution_weights(const SolutionPool& pool, double temperature = 1.0);

// p_d = sum of weights of pool entries with x_d = 1.
std::vector<double> marginals(const SolutionPool& pool, const std::vector<double>& weights);

LabeledSample make_labels(const SolutionPool& pool, double temperature = 1.0);

// Ground-truth marginals from the full conditional distribution over every
// feasible assignment (brute-force scale only).
std::vector<double> exact_marginals(const MilpInstance& inst, double temperature = 1.0);

// FNV-1a over the binary keys and objective bytes, for provenance tracking
// of which pool produced a label file.
uint64_t pool_digest(const SolutionPool& pool);

nlohmann::json labels_to_json(const LabeledSample& sample, uint64_t digest);
LabeledSample labels_from_json(const nlohmann::json& j);

}  // namespace pns
