#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pns/gnn.hpp"
#include "pns/instgen.hpp"
#include "pns/milp.hpp"
#include "pns/solver.hpp"

namespace pns {

enum class SearchMode : uint8_t { kSearch, kFix };

// How the trust-region ball is written into the restricted instance.
// kIndicator adds one binary deviation variable per guarded component;
// kCompact adds a single row over the originals, which is equivalent for
// binary variables and adds nothing to the model size.
enum class TrustRegionForm : uint8_t { kIndicator, kCompact };

std::string to_string(SearchMode m);
std::string to_string(TrustRegionForm f);
SearchMode parse_search_mode(const std::string& s);
TrustRegionForm parse_trust_region_form(const std::string& s);

struct SearchConfig {
  int k0 = 0;     // components pinned toward 0
  int k1 = 0;     // components pinned toward 1
  int delta = 0;  // ball radius; ignored in kFix mode
  SearchMode mode = SearchMode::kSearch;
  TrustRegionForm formulation = TrustRegionForm::kIndicator;
  double time_limit = kInf;  // seconds for the one restricted solve
  SolveParams solver;

  // q is the binary count of the target instance.
  void validate(int q) const;
};

// Family defaults scaled to desk-size instances: the pinned fractions stay
// fixed while the radius scales linearly with the binary count. Family names
// follow GenSpec ("independent_set", "combinatorial_auction").
SearchConfig default_search_config(const std::string& family, int q);

// Index sets of binaries pinned to 0 (`zeros`) and to 1 (`ones`), both
// sorted ascending and disjoint.
struct PartialSolution {
  std::vector<int> zeros;
  std::vector<int> ones;

  int size() const { return static_cast<int>(zeros.size() + ones.size()); }
  void validate(int q) const;
};

// zeros := indices of the k0 smallest probabilities, ones := the k1 largest;
// ties go to the lower index, and a tie spanning both ends is claimed by
// `zeros` first. Throws when k0 + k1 exceeds the probability count.
PartialSolution select_partial(std::span<const double> probs, int k0, int k1);

// Restricted instance allowing at most `delta` of the pinned components to
// deviate from their pinned values. The original variables, bounds and rows
// are untouched; metadata records (k0, k1, delta, formulation). With the
// indicator form the deviation binaries sit at positions [q, q + k0 + k1).
MilpInstance build_trust_region(const MilpInstance& inst, const PartialSolution& ps, int delta,
                                TrustRegionForm formulation);

// Pins every selected component hard: l_d = u_d = pinned value.
MilpInstance build_fixing(const MilpInstance& inst, const PartialSolution& ps);

// Intermediate products of predict_and_search, for export and inspection.
struct SearchDiagnostics {
  std::vector<double> probs;
  PartialSolution partial;
  MilpInstance restricted;
};

// Featurize, predict marginals, select the partial solution, build the
// restricted instance per cfg, and solve it once under cfg.time_limit.
// Objectives stay in canonical minimization form; the incumbent and pool are
// re-expressed over the original variables (deviation binaries stripped).
SolveResult predict_and_search(const MilpInstance& inst, const GnnModel& model,
                               const SearchConfig& cfg, SearchDiagnostics* diag = nullptr);

}  // namespace pns
