#include "pns/featurize.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "pns/instgen.hpp"
#include "pns/milp.hpp"

using namespace pns;

namespace {

MilpInstance tiny() {
  MilpInstance inst;
  inst.name = "TINY";
  inst.num_vars = 2;
  inst.num_binary = 2;
  inst.objective = {-1.0, -1.0};
  inst.rows = {Row{"C1", {{0, 1.0}, {1, 1.0}}, 1.0, RowSense::kLe}};
  inst.lower = {0.0, 0.0};
  inst.upper = {1.0, 1.0};
  inst.var_kind = {VarKind::kBinary, VarKind::kBinary};
  inst.var_names = {"x1", "x2"};
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("tiny instance features match the hand computation") {
  BipartiteGraph g = featurize(tiny());
  REQUIRE(g.n == 2);
  REQUIRE(g.m == 1);
  CHECK(g.q == 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(g.var_feats(j, 0) == doctest::Approx(-1.0).epsilon(1e-9));  // obj
    CHECK(g.var_feats(j, 1) == 1.0);                                  // mean coeff
    CHECK(g.var_feats(j, 2) == 1.0);                                  // degree
    CHECK(g.var_feats(j, 3) == 1.0);                                  // max
    CHECK(g.var_feats(j, 4) == 1.0);                                  // min
    CHECK(g.var_feats(j, 5) == 1.0);                                  // integral marker
  }
  CHECK(g.con_feats(0, 0) == 1.0);                                  // mean row coeff
  CHECK(g.con_feats(0, 1) == 2.0);                                  // row size
  CHECK(g.con_feats(0, 2) == doctest::Approx(0.5).epsilon(1e-9));   // 1/(1+1)
  CHECK(g.con_feats(0, 3) == 0.0);                                  // LE
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0] == EdgeEntry{0, 0, 1.0});
  CHECK(g.edges[1] == EdgeEntry{0, 1, 1.0});
}

TEST_CASE("position embedding is little-endian over the 0-based index") {
  MilpInstance inst;
  inst.num_vars = 8;
  inst.num_binary = 8;
  inst.objective.assign(8, -1.0);
  inst.lower.assign(8, 0.0);
  inst.upper.assign(8, 1.0);
  inst.var_kind.assign(8, VarKind::kBinary);
  for (int j = 0; j < 8; ++j) inst.var_names.push_back("x" + std::to_string(j));
  inst.validate();
  BipartiteGraph g = featurize(inst);

  // Sixth variable (index 5) encodes 5 = 101b.
  const std::vector<double> expect = {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  for (int b = 0; b < kPosEmbBits; ++b) {
    CHECK(g.var_feats(5, 6 + b) == expect[b]);
    CHECK(g.var_feats(0, 6 + b) == 0.0);  // index 0 encodes 0
  }
  // All entries are bits.
  for (int j = 0; j < 8; ++j) {
    for (int b = 0; b < kPosEmbBits; ++b) {
      const double v = g.var_feats(j, 6 + b);
      CHECK((v == 0.0 || v == 1.0));
    }
  }
}

TEST_CASE("position embedding wraps at 4096") {
  MilpInstance inst;
  const int n = 4098;
  inst.num_vars = n;
  inst.num_binary = 0;
  inst.objective.assign(n, 1.0);
  inst.lower.assign(n, 0.0);
  inst.upper.assign(n, 1.0);
  inst.var_kind.assign(n, VarKind::kContinuous);
  for (int j = 0; j < n; ++j) inst.var_names.push_back("x" + std::to_string(j));
  inst.validate();
  BipartiteGraph g = featurize(inst);
  for (int b = 0; b < kPosEmbBits; ++b) CHECK(g.var_feats(4096, 6 + b) == 0.0);
  CHECK(g.var_feats(4097, 6) == 1.0);  // 4097 mod 4096 = 1
  for (int b = 1; b < kPosEmbBits; ++b) CHECK(g.var_feats(4097, 6 + b) == 0.0);
  CHECK(g.var_feats(0, 5) == 0.0);  // continuous variables are not marked integral
}

TEST_CASE("variables outside every row use the empty-aggregate convention") {
  MilpInstance inst = tiny();
  inst.num_vars = 3;
  inst.objective.push_back(4.0);
  inst.lower.push_back(-1.0);
  inst.upper.push_back(2.0);
  inst.var_kind.push_back(VarKind::kContinuous);
  inst.var_names.push_back("free");
  inst.validate();
  BipartiteGraph g = featurize(inst);
  CHECK(g.var_feats(2, 1) == 0.0);
  CHECK(g.var_feats(2, 2) == 0.0);
  CHECK(g.var_feats(2, 3) == 0.0);
  CHECK(g.var_feats(2, 4) == 0.0);
  CHECK(g.var_feats(2, 0) == doctest::Approx(1.0).epsilon(1e-9));  // 4 / max|c|
}

TEST_CASE("sense encoding distinguishes LE, EQ and GE") {
  MilpInstance inst = tiny();
  inst.rows.push_back(Row{"C2", {{0, 2.0}}, -3.0, RowSense::kGe});
  inst.rows.push_back(Row{"C3", {{1, -2.0}, {0, 4.0}}, 0.0, RowSense::kEq});
  inst.validate();
  BipartiteGraph g = featurize(inst);
  CHECK(g.con_feats(0, 3) == 0.0);
  CHECK(g.con_feats(1, 3) == 2.0);
  CHECK(g.con_feats(2, 3) == 1.0);
  // Row C2: mean 2, nnz 1, rhs -3/(2+3).
  CHECK(g.con_feats(1, 0) == 2.0);
  CHECK(g.con_feats(1, 1) == 1.0);
  CHECK(g.con_feats(1, 2) == doctest::Approx(-0.6).epsilon(1e-9));
  // Row C3: mean (4-2)/2, rhs 0.
  CHECK(g.con_feats(2, 0) == 1.0);
  CHECK(g.con_feats(2, 2) == 0.0);
  // Variable 0 now spans coefficients {1, 2, 4}; variable 1 spans {1, -2}.
  CHECK(g.var_feats(0, 1) == doctest::Approx(7.0 / 3.0));
  CHECK(g.var_feats(0, 2) == 3.0);
  CHECK(g.var_feats(0, 3) == 4.0);
  CHECK(g.var_feats(0, 4) == 1.0);
  CHECK(g.var_feats(1, 1) == doctest::Approx(-0.5));
  CHECK(g.var_feats(1, 3) == 1.0);
  CHECK(g.var_feats(1, 4) == -2.0);
}

TEST_CASE("row permutation only permutes constraint rows and edge indices") {
  MilpInstance a = tiny();
  a.rows.push_back(Row{"C2", {{0, 2.0}}, 3.0, RowSense::kGe});
  a.rows.push_back(Row{"C3", {{1, -1.0}}, 0.5, RowSense::kEq});
  a.validate();
  MilpInstance b = a;
  std::rotate(b.rows.begin(), b.rows.begin() + 1, b.rows.end());  // (C2, C3, C1)
  b.validate();

  BipartiteGraph ga = featurize(a);
  BipartiteGraph gb = featurize(b);
  CHECK(ga.var_feats == gb.var_feats);
  // a row i maps to b row (i+2) mod 3 under the rotation
  for (int i = 0; i < 3; ++i) {
    CHECK(ga.con_feats.row(i) == gb.con_feats.row((i + 2) % 3));
  }
  std::set<std::tuple<int, int, double>> ea, eb;
  for (const EdgeEntry& e : ga.edges) ea.insert({(e.row + 2) % 3, e.col, e.coeff});
  for (const EdgeEntry& e : gb.edges) eb.insert({e.row, e.col, e.coeff});
  CHECK(ea == eb);
}

TEST_CASE("generated instances produce finite, bounded features") {
  BipartiteGraph g = featurize(gen_combinatorial_auction(15, 40, 5));
  CHECK(g.var_feats.allFinite());
  CHECK(g.con_feats.allFinite());
  CHECK(g.var_feats.col(0).cwiseAbs().maxCoeff() <= 1.0);
  CHECK(static_cast<int>(g.edges.size()) ==
        static_cast<int>(g.var_feats.col(2).sum()));  // degree sum = edge count
  CHECK(static_cast<int>(g.edges.size()) == static_cast<int>(g.con_feats.col(1).sum()));
}

TEST_CASE("graph JSON round trip is exact") {
  BipartiteGraph g = featurize(gen_independent_set(10, 3, 4));
  nlohmann::json j = graph_to_json(g);
  BipartiteGraph back = graph_from_json(j);
  CHECK(back.n == g.n);
  CHECK(back.m == g.m);
  CHECK(back.q == g.q);
  CHECK(back.var_feats == g.var_feats);
  CHECK(back.con_feats == g.con_feats);
  CHECK(back.edges == g.edges);
  CHECK(j.at("normalization_meta").at("var_feature_width") == 18);
}
