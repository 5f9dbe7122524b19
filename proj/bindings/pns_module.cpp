// Python bindings over the C++ core. Enums cross the boundary as strings,
// JSON artifacts as JSON strings, matrices as numpy arrays.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "pns/featurize.hpp"
#include "pns/gnn.hpp"
#include "pns/harness.hpp"
#include "pns/instgen.hpp"
#include "pns/labels.hpp"
#include "pns/milp.hpp"
#include "pns/search.hpp"
#include "pns/solver.hpp"

namespace py = pybind11;
using namespace pns;

namespace {

std::vector<py::dict> rows_as_dicts(const MilpInstance& inst) {
  std::vector<py::dict> out;
  out.reserve(inst.rows.size());
  for (const Row& row : inst.rows) {
    py::dict d;
    d["name"] = row.name;
    d["coeffs"] = row.coeffs;
    d["rhs"] = row.rhs;
    d["sense"] = row.sense == RowSense::kLe ? "<=" : row.sense == RowSense::kGe ? ">=" : "==";
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Predict-and-search toolkit for binary integer programs";

  // ---- instances -----------------------------------------------------------
  py::class_<MilpInstance>(m, "MilpInstance")
      .def_readonly("name", &MilpInstance::name)
      .def_readonly("num_vars", &MilpInstance::num_vars)
      .def_readonly("num_binary", &MilpInstance::num_binary)
      .def_readonly("objective", &MilpInstance::objective)
      .def_readonly("lower", &MilpInstance::lower)
      .def_readonly("upper", &MilpInstance::upper)
      .def_readonly("var_names", &MilpInstance::var_names)
      .def_readonly("meta", &MilpInstance::meta)
      .def_property_readonly(
          "maximize", [](const MilpInstance& i) { return i.sense_flag == ObjSense::kMax; })
      .def_property_readonly("rows", &rows_as_dicts)
      .def("objective_value",
           [](const MilpInstance& i, const std::vector<double>& x) {
             return i.objective_value(x);
           })
      .def("to_original_sense", &MilpInstance::to_original_sense)
      .def("__repr__", [](const MilpInstance& i) {
        return "MilpInstance(name='" + i.name + "', vars=" + std::to_string(i.num_vars) +
               ", binary=" + std::to_string(i.num_binary) +
               ", rows=" + std::to_string(i.rows.size()) + ")";
      });

  m.def("parse_mps", &parse_mps, py::arg("text"));
  m.def("write_mps", &write_mps, py::arg("instance"));
  m.def(
      "check_feasible",
      [](const MilpInstance& inst, const std::vector<double>& x, double tol) {
        return check_feasible(inst, x, tol);
      },
      py::arg("instance"), py::arg("x"), py::arg("tol") = kDefaultFeasTol);

  py::class_<Solution>(m, "Solution")
      .def_readonly("values", &Solution::values)
      .def_readonly("objective", &Solution::objective)
      .def_readonly("feasible", &Solution::feasible)
      .def_readonly("integral", &Solution::integral);

  // ---- generators ----------------------------------------------------------
  py::class_<GenSpec>(m, "GenSpec")
      .def(py::init([](std::string family, int nodes, int affinity, int items, int bids,
                       uint64_t seed, int count) {
             GenSpec s;
             s.family = std::move(family);
             s.nodes = nodes;
             s.affinity = affinity;
             s.items = items;
             s.bids = bids;
             s.seed = seed;
             s.count = count;
             return s;
           }),
           py::arg("family") = "independent_set", py::arg("nodes") = 150,
           py::arg("affinity") = 4, py::arg("items") = 30, py::arg("bids") = 80,
           py::arg("seed") = 0, py::arg("count") = 1)
      .def_readwrite("family", &GenSpec::family)
      .def_readwrite("nodes", &GenSpec::nodes)
      .def_readwrite("affinity", &GenSpec::affinity)
      .def_readwrite("items", &GenSpec::items)
      .def_readwrite("bids", &GenSpec::bids)
      .def_readwrite("seed", &GenSpec::seed)
      .def_readwrite("count", &GenSpec::count);

  m.def("gen_independent_set", &gen_independent_set, py::arg("nodes"), py::arg("affinity"),
        py::arg("seed"));
  m.def("gen_combinatorial_auction", &gen_combinatorial_auction, py::arg("items"),
        py::arg("bids"), py::arg("seed"));
  m.def("generate_instance", &generate_instance, py::arg("spec"), py::arg("index") = 0);
  m.def("write_dataset", &write_dataset, py::arg("spec"), py::arg("dir"));

  // ---- solver ----------------------------------------------------------------
  py::class_<SolveParams>(m, "SolveParams")
      .def(py::init<>())
      .def_readwrite("time_limit", &SolveParams::time_limit)
      .def_readwrite("pool_size", &SolveParams::pool_size)
      .def_readwrite("rel_gap_tol", &SolveParams::rel_gap_tol)
      .def_readwrite("int_tol", &SolveParams::int_tol)
      .def_readwrite("node_limit", &SolveParams::node_limit)
      .def_readwrite("seed", &SolveParams::seed)
      .def_readwrite("enable_diving", &SolveParams::enable_diving)
      .def_readwrite("dive_lp_limit", &SolveParams::dive_lp_limit);

  py::class_<PoolEntry>(m, "PoolEntry")
      .def_readonly("x", &PoolEntry::x)
      .def_readonly("objective", &PoolEntry::objective);

  py::class_<SolutionPool>(m, "SolutionPool")
      .def(py::init<int, int>(), py::arg("capacity"), py::arg("num_binary"))
      .def("offer", &SolutionPool::offer, py::arg("x"), py::arg("objective"))
      .def_property_readonly("entries", &SolutionPool::entries)
      .def("__len__", &SolutionPool::size);

  py::class_<IncumbentEvent>(m, "IncumbentEvent")
      .def_readonly("seconds", &IncumbentEvent::seconds)
      .def_readonly("nodes", &IncumbentEvent::nodes)
      .def_readonly("objective", &IncumbentEvent::objective);

  py::class_<SolveStats>(m, "SolveStats")
      .def_readonly("nodes", &SolveStats::nodes)
      .def_readonly("lp_solves", &SolveStats::lp_solves)
      .def_readonly("lp_iterations", &SolveStats::lp_iterations)
      .def_readonly("dives", &SolveStats::dives)
      .def_readonly("wall_seconds", &SolveStats::wall_seconds);

  py::class_<SolveResult>(m, "SolveResult")
      .def_property_readonly("status",
                             [](const SolveResult& r) { return to_string(r.status); })
      .def_readonly("incumbent", &SolveResult::incumbent)
      .def_readonly("bound", &SolveResult::bound)
      .def_property_readonly("pool",
                             [](const SolveResult& r) { return r.pool.entries(); })
      .def_readonly("stats", &SolveResult::stats)
      .def_readonly("events", &SolveResult::events)
      .def("gap_to_bound", &SolveResult::gap_to_bound);

  m.def("solve_milp", &solve_milp, py::arg("instance"), py::arg("params") = SolveParams());

  py::class_<BruteForceResult>(m, "BruteForceResult")
      .def_readonly("feasible", &BruteForceResult::feasible)
      .def_readonly("best", &BruteForceResult::best)
      .def_readonly("num_optimal", &BruteForceResult::num_optimal)
      .def_readonly("num_feasible", &BruteForceResult::num_feasible);

  m.def("brute_force", &brute_force, py::arg("instance"));

  // ---- features and labels -----------------------------------------------------
  py::class_<EdgeEntry>(m, "EdgeEntry")
      .def_readonly("row", &EdgeEntry::row)
      .def_readonly("col", &EdgeEntry::col)
      .def_readonly("coeff", &EdgeEntry::coeff);

  py::class_<BipartiteGraph>(m, "BipartiteGraph")
      .def_readonly("n", &BipartiteGraph::n)
      .def_readonly("m", &BipartiteGraph::m)
      .def_readonly("q", &BipartiteGraph::q)
      .def_readonly("var_feats", &BipartiteGraph::var_feats)
      .def_readonly("con_feats", &BipartiteGraph::con_feats)
      .def_readonly("edges", &BipartiteGraph::edges);

  m.def("featurize", &featurize, py::arg("instance"));

  py::class_<LabeledSample>(m, "LabeledSample")
      .def_readonly("q", &LabeledSample::q)
      .def_readonly("objectives", &LabeledSample::objectives)
      .def_readonly("weights", &LabeledSample::weights)
      .def_readonly("marginals", &LabeledSample::marginals)
      .def_readonly("bks_objective", &LabeledSample::bks_objective)
      .def_readonly("temperature", &LabeledSample::temperature);

  m.def("make_labels", &make_labels, py::arg("pool"), py::arg("temperature") = 1.0);
  m.def("exact_marginals", &exact_marginals, py::arg("instance"), py::arg("temperature") = 1.0);

  // ---- model -----------------------------------------------------------------
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("clip_norm", &TrainConfig::clip_norm)
      .def_readwrite("eps", &TrainConfig::eps)
      .def_readwrite("hidden", &TrainConfig::hidden)
      .def_readwrite("use_edge_embedding", &TrainConfig::use_edge_embedding);

  py::class_<GnnModel>(m, "GnnModel")
      .def_readonly("hidden", &GnnModel::hidden)
      .def_readonly("seed", &GnnModel::seed)
      .def_readonly("use_edge_embedding", &GnnModel::use_edge_embedding);

  py::class_<TrainHistory>(m, "TrainHistory")
      .def_readonly("train_loss", &TrainHistory::train_loss)
      .def_readonly("valid_loss", &TrainHistory::valid_loss)
      .def_readonly("best_epoch", &TrainHistory::best_epoch);

  m.def("make_model", &make_model, py::arg("seed"), py::arg("hidden") = 64,
        py::arg("use_edge_embedding") = false, py::arg("var_in") = kVarFeatureCount,
        py::arg("con_in") = kConFeatureCount);
  m.def("forward", &forward, py::arg("model"), py::arg("graph"));
  m.def(
      "train_gnn",
      [](const std::vector<std::pair<BipartiteGraph, std::vector<double>>>& train,
         const std::vector<std::pair<BipartiteGraph, std::vector<double>>>& valid,
         const TrainConfig& cfg) {
        const auto pack = [](const auto& pairs) {
          std::vector<TrainSample> out;
          out.reserve(pairs.size());
          for (const auto& [graph, target] : pairs) out.push_back({graph, target});
          return out;
        };
        TrainHistory hist;
        GnnModel model = train_gnn(pack(train), pack(valid), cfg, &hist);
        return py::make_tuple(std::move(model), std::move(hist));
      },
      py::arg("train"), py::arg("valid") = std::vector<std::pair<BipartiteGraph, std::vector<double>>>{},
      py::arg("config") = TrainConfig());
  m.def(
      "dataset_loss",
      [](const GnnModel& model,
         const std::vector<std::pair<BipartiteGraph, std::vector<double>>>& samples,
         double eps) {
        std::vector<TrainSample> packed;
        packed.reserve(samples.size());
        for (const auto& [graph, target] : samples) packed.push_back({graph, target});
        return dataset_loss(model, packed, eps);
      },
      py::arg("model"), py::arg("samples"), py::arg("eps") = 1e-7);
  m.def("model_to_json", [](const GnnModel& model) { return model_to_json(model).dump(); },
        py::arg("model"));
  m.def("model_from_json",
        [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); },
        py::arg("text"));

  // ---- search -----------------------------------------------------------------
  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("k0", &SearchConfig::k0)
      .def_readwrite("k1", &SearchConfig::k1)
      .def_readwrite("delta", &SearchConfig::delta)
      .def_readwrite("time_limit", &SearchConfig::time_limit)
      .def_readwrite("solver", &SearchConfig::solver)
      .def_property(
          "mode", [](const SearchConfig& c) { return to_string(c.mode); },
          [](SearchConfig& c, const std::string& s) { c.mode = parse_search_mode(s); })
      .def_property(
          "formulation", [](const SearchConfig& c) { return to_string(c.formulation); },
          [](SearchConfig& c, const std::string& s) {
            c.formulation = parse_trust_region_form(s);
          });

  py::class_<PartialSolution>(m, "PartialSolution")
      .def(py::init([](std::vector<int> zeros, std::vector<int> ones) {
             return PartialSolution{std::move(zeros), std::move(ones)};
           }),
           py::arg("zeros") = std::vector<int>{}, py::arg("ones") = std::vector<int>{})
      .def_readwrite("zeros", &PartialSolution::zeros)
      .def_readwrite("ones", &PartialSolution::ones)
      .def("__len__", &PartialSolution::size);

  m.def("default_search_config", &default_search_config, py::arg("family"), py::arg("q"));
  m.def(
      "select_partial",
      [](const std::vector<double>& probs, int k0, int k1) {
        return select_partial(probs, k0, k1);
      },
      py::arg("probs"), py::arg("k0"), py::arg("k1"));
  m.def("build_trust_region",
        [](const MilpInstance& inst, const PartialSolution& ps, int delta,
           const std::string& form) {
          return build_trust_region(inst, ps, delta, parse_trust_region_form(form));
        },
        py::arg("instance"), py::arg("partial"), py::arg("delta"),
        py::arg("formulation") = "indicator");
  m.def("build_fixing", &build_fixing, py::arg("instance"), py::arg("partial"));
  m.def(
      "predict_and_search",
      [](const MilpInstance& inst, const GnnModel& model, const SearchConfig& cfg,
         bool details) -> py::object {
        SearchDiagnostics diag;
        SolveResult result = predict_and_search(inst, model, cfg, &diag);
        if (!details) return py::cast(std::move(result));
        py::dict d;
        d["result"] = py::cast(std::move(result));
        d["probs"] = diag.probs;
        d["partial"] = diag.partial;
        d["restricted"] = diag.restricted;
        return d;
      },
      py::arg("instance"), py::arg("model"), py::arg("config"), py::arg("details") = false);

  // ---- metrics ------------------------------------------------------------------
  m.def("gap_abs", &gap_abs, py::arg("obj"), py::arg("bks"));
  m.def("gap_rel", &gap_rel, py::arg("obj"), py::arg("bks"));
  m.def("gain_percent", &gain_percent, py::arg("baseline"), py::arg("ours"));
}
