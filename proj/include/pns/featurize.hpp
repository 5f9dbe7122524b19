#pragma once

#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pns/milp.hpp"

namespace pns {

inline constexpr int kVarFeatureCount = 18;  // obj, v_coeff, Nv_coeff, max, min, int, 12 pos bits
inline constexpr int kConFeatureCount = 4;   // c_coeff, Nc_coeff, rhs, sense
inline constexpr int kPosEmbBits = 12;

struct EdgeEntry {
  int row = 0;
  int col = 0;
  double coeff = 0.0;

  bool operator==(const EdgeEntry&) const = default;
};

// Bipartite constraint/variable graph with static (LP-free) node features.
// Edges exist exactly where the constraint matrix is nonzero; there are no
// variable-variable or constraint-constraint edges.
struct BipartiteGraph {
  int n = 0;  // variables
  int m = 0;  // constraints
  int q = 0;  // leading binary variables
  Eigen::MatrixXd var_feats;        // n x 18
  Eigen::MatrixXd con_feats;        // m x 4
  std::vector<EdgeEntry> edges;     // row-major order
};

// Feature extraction:
//   obj      c_j / (max_k |c_k| + 1e-10)
//   v_coeff  mean of the variable's nonzero constraint coefficients (0 if none)
//   Nv_coeff number of constraints touching the variable
//   max/min  extremes over the same coefficient set (0 if none)
//   int      1 for binary variables
//   pos_emb  12 little-endian bits of (index mod 4096), 0-based
//   c_coeff  mean of the row's nonzero coefficients
//   Nc_coeff row nonzero count
//   rhs      b_i / (max |row coeff| + |b_i| + 1e-10)
//   sense    LE 0, EQ 1, GE 2
BipartiteGraph featurize(const MilpInstance& inst);

nlohmann::json graph_to_json(const BipartiteGraph& graph);
BipartiteGraph graph_from_json(const nlohmann::json& j);

}  // namespace pns
