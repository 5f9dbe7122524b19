#include "pns/labels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace pns {

namespace {

std::vector<double> softmax_of_negated(const std::vector<double>& objectives, double temperature) {
  if (objectives.empty()) throw std::invalid_argument("weights need a non-empty pool");
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  double shift = -kInf;
  for (double obj : objectives) shift = std::max(shift, -obj / temperature);
  std::vector<double> w(objectives.size());
  double total = 0.0;
  for (size_t j = 0; j < objectives.size(); ++j) {
    w[j] = std::exp(-objectives[j] / temperature - shift);
    total += w[j];
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

std::vector<double> solution_weights(const SolutionPool& pool, double temperature) {
  std::vector<double> objectives;
  objectives.reserve(pool.size());
  for (const PoolEntry& e : pool.entries()) objectives.push_back(e.objective);
  return softmax_of_negated(objectives, temperature);
}

std::vector<double> marginals(const SolutionPool& pool, const std::vector<double>& weights) {
  if (weights.size() != pool.size()) {
    throw std::invalid_argument("weights and pool sizes disagree");
  }
  if (pool.empty()) throw std::invalid_argument("marginals need a non-empty pool");
  // Only the binary prefix is labeled; its length is tracked by the pool.
  std::vector<double> p(pool.num_binary(), 0.0);
  for (size_t j = 0; j < pool.size(); ++j) {
    const PoolEntry& e = pool.entries()[j];
    for (int d = 0; d < pool.num_binary(); ++d) {
      if (e.x[d] > 0.5) p[d] += weights[j];
    }
  }
  for (double& v : p) v = std::clamp(v, 0.0, 1.0);
  return p;
}

LabeledSample make_labels(const SolutionPool& pool, double temperature) {
  LabeledSample s;
  s.q = pool.num_binary();
  s.temperature = temperature;
  for (const PoolEntry& e : pool.entries()) s.objectives.push_back(e.objective);
  s.weights = solution_weights(pool, temperature);
  s.marginals = marginals(pool, s.weights);
  s.bks_objective = s.objectives.front();
  for (double obj : s.objectives) s.bks_objective = std::min(s.bks_objective, obj);
  return s;
}

std::vector<double> exact_marginals(const MilpInstance& inst, double temperature) {
  std::vector<std::vector<double>> xs;
  std::vector<double> objectives;
  for_each_feasible(inst, [&](const std::vector<double>& x, double obj) {
    xs.push_back(x);
    objectives.push_back(obj);
  });
  if (xs.empty()) throw std::invalid_argument("instance has no feasible assignment");
  const std::vector<double> w = softmax_of_negated(objectives, temperature);
  std::vector<double> p(inst.num_binary, 0.0);
  for (size_t j = 0; j < xs.size(); ++j) {
    for (int d = 0; d < inst.num_binary; ++d) {
      if (xs[j][d] > 0.5) p[d] += w[j];
    }
  }
  return p;
}

uint64_t pool_digest(const SolutionPool& pool) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
  auto mix = [&h](uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (const PoolEntry& e : pool.entries()) {
    for (int d = 0; d < pool.num_binary(); ++d) mix(e.x[d] > 0.5 ? 1 : 0);
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(e.objective));
    std::memcpy(&bits, &e.objective, sizeof(bits));
    for (int b = 0; b < 8; ++b) mix(static_cast<uint8_t>(bits >> (8 * b)));
  }
  return h;
}

nlohmann::json labels_to_json(const LabeledSample& sample, uint64_t digest) {
  return nlohmann::json{{"q", sample.q},
                        {"objectives", sample.objectives},
                        {"weights", sample.weights},
                        {"marginals", sample.marginals},
                        {"bks_objective", sample.bks_objective},
                        {"temperature", sample.temperature},
                        {"pool_digest", digest}};
}

LabeledSample labels_from_json(const nlohmann::json& j) {
  LabeledSample s;
  s.q = j.at("q").get<int>();
  s.objectives = j.at("objectives").get<std::vector<double>>();
  s.weights = j.at("weights").get<std::vector<double>>();
  s.marginals = j.at("marginals").get<std::vector<double>>();
  s.bks_objective = j.at("bks_objective").get<double>();
  s.temperature = j.value("temperature", 1.0);
  if (static_cast<int>(s.marginals.size()) != s.q) {
    throw std::invalid_argument("label JSON: marginal count disagrees with q");
  }
  if (s.weights.size() != s.objectives.size()) {
    throw std::invalid_argument("label JSON: weight count disagrees with objectives");
  }
  return s;
}

}  // namespace pns
