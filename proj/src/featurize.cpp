#include "pns/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pns {

BipartiteGraph featurize(const MilpInstance& inst) {
  inst.validate();
  BipartiteGraph g;
  g.n = inst.num_vars;
  g.m = inst.num_rows();
  g.q = inst.num_binary;
  g.var_feats = Eigen::MatrixXd::Zero(g.n, kVarFeatureCount);
  g.con_feats = Eigen::MatrixXd::Zero(g.m, kConFeatureCount);

  double obj_scale = 0.0;
  for (double c : inst.objective) obj_scale = std::max(obj_scale, std::abs(c));
  obj_scale += 1e-10;

  struct VarAgg {
    double sum = 0.0;
    double max = 0.0;
    double min = 0.0;
    int count = 0;
  };
  std::vector<VarAgg> agg(g.n);

  for (int i = 0; i < g.m; ++i) {
    const Row& row = inst.rows[i];
    double sum = 0.0;
    double max_abs = 0.0;
    for (const auto& [j, c] : row.coeffs) {
      g.edges.push_back({i, j, c});
      sum += c;
      max_abs = std::max(max_abs, std::abs(c));
      VarAgg& a = agg[j];
      if (a.count == 0) {
        a.max = a.min = c;
      } else {
        a.max = std::max(a.max, c);
        a.min = std::min(a.min, c);
      }
      a.sum += c;
      ++a.count;
    }
    const int nnz = static_cast<int>(row.coeffs.size());
    g.con_feats(i, 0) = nnz > 0 ? sum / nnz : 0.0;
    g.con_feats(i, 1) = nnz;
    g.con_feats(i, 2) = row.rhs / (max_abs + std::abs(row.rhs) + 1e-10);
    g.con_feats(i, 3) = row.sense == RowSense::kLe ? 0.0 : row.sense == RowSense::kEq ? 1.0 : 2.0;
  }

  for (int j = 0; j < g.n; ++j) {
    const VarAgg& a = agg[j];
    g.var_feats(j, 0) = inst.objective[j] / obj_scale;
    g.var_feats(j, 1) = a.count > 0 ? a.sum / a.count : 0.0;
    g.var_feats(j, 2) = a.count;
    g.var_feats(j, 3) = a.max;
    g.var_feats(j, 4) = a.min;
    g.var_feats(j, 5) = j < g.q ? 1.0 : 0.0;
    const int value = j % 4096;
    for (int b = 0; b < kPosEmbBits; ++b) {
      g.var_feats(j, 6 + b) = (value >> b) & 1;
    }
  }
  return g;
}

nlohmann::json graph_to_json(const BipartiteGraph& g) {
  nlohmann::json j;
  j["n"] = g.n;
  j["m"] = g.m;
  j["q"] = g.q;
  auto matrix_rows = [](const Eigen::MatrixXd& mat) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < mat.cols(); ++c) row.push_back(mat(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["var_feats"] = matrix_rows(g.var_feats);
  j["con_feats"] = matrix_rows(g.con_feats);
  nlohmann::json edges = nlohmann::json::array();
  for (const EdgeEntry& e : g.edges) edges.push_back({e.row, e.col, e.coeff});
  j["edges"] = std::move(edges);
  j["normalization_meta"] = {
      {"obj", "max_abs"},
      {"rhs", "row_max_abs_plus_rhs"},
      {"pos_emb", "12 little-endian bits of (index mod 4096)"},
      {"var_feature_width", kVarFeatureCount},
      {"con_feature_width", kConFeatureCount},
  };
  return j;
}

BipartiteGraph graph_from_json(const nlohmann::json& j) {
  BipartiteGraph g;
  g.n = j.at("n").get<int>();
  g.m = j.at("m").get<int>();
  g.q = j.at("q").get<int>();
  auto read_matrix = [](const nlohmann::json& rows, int expect_rows, int expect_cols) {
    if (static_cast<int>(rows.size()) != expect_rows) {
      throw std::invalid_argument("graph JSON: bad matrix row count");
    }
    Eigen::MatrixXd mat(expect_rows, expect_cols);
    for (int r = 0; r < expect_rows; ++r) {
      const nlohmann::json& row = rows.at(r);
      if (static_cast<int>(row.size()) != expect_cols) {
        throw std::invalid_argument("graph JSON: bad matrix column count");
      }
      for (int c = 0; c < expect_cols; ++c) mat(r, c) = row.at(c).get<double>();
    }
    return mat;
  };
  g.var_feats = read_matrix(j.at("var_feats"), g.n, kVarFeatureCount);
  g.con_feats = read_matrix(j.at("con_feats"), g.m, kConFeatureCount);
  for (const nlohmann::json& e : j.at("edges")) {
    g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
  }
  return g;
}

}  // namespace pns
