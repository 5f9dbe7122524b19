#include "pns/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pns/featurize.hpp"

namespace pns {

namespace {

// Appends "_" until the candidate is unused, then claims it.
std::string claim_name(std::set<std::string>& used, std::string candidate) {
  while (!used.insert(candidate).second) candidate += "_";
  return candidate;
}

std::set<std::string> name_set(const std::vector<std::string>& names) {
  return std::set<std::string>(names.begin(), names.end());
}

std::set<std::string> row_name_set(const std::vector<Row>& rows) {
  std::set<std::string> used;
  for (const Row& r : rows) used.insert(r.name);
  return used;
}

}  // namespace

std::string to_string(SearchMode m) { return m == SearchMode::kSearch ? "search" : "fix"; }

std::string to_string(TrustRegionForm f) {
  return f == TrustRegionForm::kIndicator ? "indicator" : "compact";
}

SearchMode parse_search_mode(const std::string& s) {
  if (s == "search") return SearchMode::kSearch;
  if (s == "fix") return SearchMode::kFix;
  throw std::invalid_argument("unknown search mode: " + s);
}

TrustRegionForm parse_trust_region_form(const std::string& s) {
  if (s == "indicator") return TrustRegionForm::kIndicator;
  if (s == "compact") return TrustRegionForm::kCompact;
  throw std::invalid_argument("unknown trust-region formulation: " + s);
}

void SearchConfig::validate(int q) const {
  if (k0 < 0 || k1 < 0) throw std::invalid_argument("k0/k1 must be non-negative");
  if (k0 + k1 > q) throw std::invalid_argument("k0 + k1 exceeds the binary count");
  if (delta < 0) throw std::invalid_argument("delta must be non-negative");
  if (mode == SearchMode::kSearch && delta > k0 + k1) {
    throw std::invalid_argument("delta exceeds k0 + k1");
  }
  if (time_limit <= 0.0) throw std::invalid_argument("time_limit must be positive");
  solver.validate();
}

SearchConfig default_search_config(const std::string& family, int q) {
  if (q < 0) throw std::invalid_argument("negative binary count");
  SearchConfig cfg;
  if (family == "independent_set") {
    cfg.k0 = static_cast<int>(std::llround(0.2 * q));
    cfg.k1 = static_cast<int>(std::llround(0.2 * q));
    cfg.delta = static_cast<int>(std::ceil(15.0 * q / 1500.0));
  } else if (family == "combinatorial_auction") {
    cfg.k0 = static_cast<int>(std::llround(0.27 * q));
    cfg.k1 = 0;
    cfg.delta = std::max(1, static_cast<int>(std::llround(10.0 * q / 1500.0)));
  } else {
    throw std::invalid_argument("unknown family: " + family);
  }
  // Rounding near tiny q can overshoot the invariants; clamp back.
  cfg.k0 = std::min(cfg.k0, q);
  cfg.k1 = std::min(cfg.k1, q - cfg.k0);
  cfg.delta = std::min(cfg.delta, cfg.k0 + cfg.k1);
  return cfg;
}

void PartialSolution::validate(int q) const {
  std::set<int> seen;
  for (const std::vector<int>* part : {&zeros, &ones}) {
    for (int d : *part) {
      if (d < 0 || d >= q) throw std::invalid_argument("pinned index outside the binary block");
      if (!seen.insert(d).second) throw std::invalid_argument("pinned index repeated");
    }
  }
}

PartialSolution select_partial(std::span<const double> probs, int k0, int k1) {
  const int q = static_cast<int>(probs.size());
  if (k0 < 0 || k1 < 0) throw std::invalid_argument("k0/k1 must be non-negative");
  if (k0 + k1 > q) throw std::invalid_argument("k0 + k1 exceeds the probability count");

  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (probs[a] != probs[b]) return probs[a] < probs[b];
    return a < b;
  });

  PartialSolution ps;
  ps.zeros.assign(order.begin(), order.begin() + k0);
  std::vector<char> taken(q, 0);
  for (int d : ps.zeros) taken[d] = 1;

  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  });
  for (int d : order) {
    if (static_cast<int>(ps.ones.size()) == k1) break;
    if (!taken[d]) ps.ones.push_back(d);
  }

  std::sort(ps.zeros.begin(), ps.zeros.end());
  std::sort(ps.ones.begin(), ps.ones.end());
  return ps;
}

MilpInstance build_fixing(const MilpInstance& inst, const PartialSolution& ps) {
  ps.validate(inst.num_binary);
  MilpInstance out = inst;
  for (int d : ps.zeros) out.lower[d] = out.upper[d] = 0.0;
  for (int d : ps.ones) out.lower[d] = out.upper[d] = 1.0;
  out.meta["search_k0"] = std::to_string(ps.zeros.size());
  out.meta["search_k1"] = std::to_string(ps.ones.size());
  out.meta["search_delta"] = "0";
  out.meta["search_form"] = "fixing";
  return out;
}

MilpInstance build_trust_region(const MilpInstance& inst, const PartialSolution& ps, int delta,
                                TrustRegionForm formulation) {
  ps.validate(inst.num_binary);
  if (delta < 0) throw std::invalid_argument("delta must be non-negative");
  MilpInstance out = inst;

  std::vector<int> pinned = ps.zeros;
  pinned.insert(pinned.end(), ps.ones.begin(), ps.ones.end());

  std::set<std::string> row_names = row_name_set(out.rows);
  if (formulation == TrustRegionForm::kCompact) {
    // sum_{zeros} x_d + sum_{ones} (1 - x_d) <= delta, constants moved right.
    Row ball;
    ball.name = claim_name(row_names, "ball");
    for (int d : ps.zeros) ball.coeffs[d] = 1.0;
    for (int d : ps.ones) ball.coeffs[d] = -1.0;
    ball.rhs = static_cast<double>(delta) - static_cast<double>(ps.ones.size());
    ball.sense = RowSense::kLe;
    if (!ball.coeffs.empty()) out.rows.push_back(std::move(ball));
  } else {
    const int q = inst.num_binary;
    const int k = static_cast<int>(pinned.size());
    // Deviation binaries go right after the original binary block so the
    // instance stays canonical; structural indices >= q shift up by k.
    std::set<std::string> var_names = name_set(out.var_names);
    for (int j = 0; j < k; ++j) {
      const int at = q + j;
      out.objective.insert(out.objective.begin() + at, 0.0);
      out.lower.insert(out.lower.begin() + at, 0.0);
      out.upper.insert(out.upper.begin() + at, 1.0);
      out.var_kind.insert(out.var_kind.begin() + at, VarKind::kBinary);
      out.var_names.insert(out.var_names.begin() + at,
                           claim_name(var_names, "dev_" + inst.var_names[pinned[j]]));
    }
    out.num_vars += k;
    out.num_binary += k;
    for (Row& row : out.rows) {
      std::map<int, double> shifted;
      for (const auto& [idx, coeff] : row.coeffs) {
        shifted[idx >= q ? idx + k : idx] = coeff;
      }
      row.coeffs = std::move(shifted);
    }
    Row ball;
    ball.name = claim_name(row_names, "ball");
    ball.sense = RowSense::kLe;
    ball.rhs = static_cast<double>(delta);
    for (int j = 0; j < k; ++j) {
      const int d = pinned[j];
      const int dev = q + j;
      Row guard;
      guard.sense = RowSense::kLe;
      if (j < static_cast<int>(ps.zeros.size())) {
        guard.name = claim_name(row_names, "off_" + inst.var_names[d]);
        guard.coeffs[d] = 1.0;     // x_d <= dev_d
        guard.coeffs[dev] = -1.0;
        guard.rhs = 0.0;
      } else {
        guard.name = claim_name(row_names, "on_" + inst.var_names[d]);
        guard.coeffs[d] = -1.0;    // 1 - x_d <= dev_d
        guard.coeffs[dev] = -1.0;
        guard.rhs = -1.0;
      }
      out.rows.push_back(std::move(guard));
      ball.coeffs[dev] = 1.0;
    }
    if (!ball.coeffs.empty()) out.rows.push_back(std::move(ball));
  }

  out.meta["search_k0"] = std::to_string(ps.zeros.size());
  out.meta["search_k1"] = std::to_string(ps.ones.size());
  out.meta["search_delta"] = std::to_string(delta);
  out.meta["search_form"] = to_string(formulation);
  out.validate();
  return out;
}

SolveResult predict_and_search(const MilpInstance& inst, const GnnModel& model,
                               const SearchConfig& cfg, SearchDiagnostics* diag) {
  cfg.validate(inst.num_binary);
  const BipartiteGraph graph = featurize(inst);
  const std::vector<double> probs = forward(model, graph);
  const PartialSolution ps = select_partial(probs, cfg.k0, cfg.k1);

  MilpInstance restricted =
      cfg.mode == SearchMode::kFix
          ? build_fixing(inst, ps)
          : build_trust_region(inst, ps, cfg.delta, cfg.formulation);

  SolveParams sp = cfg.solver;
  sp.time_limit = cfg.time_limit;
  SolveResult result = solve_milp(restricted, sp);

  const int q = inst.num_binary;
  const int extra = restricted.num_binary - q;
  if (extra > 0) {
    // Drop the deviation block; everything reported refers to the original
    // variables. Objectives are unchanged since deviations cost nothing.
    auto strip = [&](std::vector<double> x) {
      x.erase(x.begin() + q, x.begin() + q + extra);
      return x;
    };
    if (result.incumbent.has_value()) {
      result.incumbent = make_solution(inst, strip(result.incumbent->values));
    }
    SolutionPool stripped_pool(result.pool.capacity(), q);
    for (const PoolEntry& e : result.pool.entries()) stripped_pool.offer(strip(e.x), e.objective);
    result.pool = stripped_pool;
  } else if (result.incumbent.has_value()) {
    // Re-evaluate against the original bounds so the flags describe inst.
    result.incumbent = make_solution(inst, result.incumbent->values);
  }

  if (diag != nullptr) {
    diag->probs = probs;
    diag->partial = ps;
    diag->restricted = std::move(restricted);
  }
  return result;
}

}  // namespace pns
