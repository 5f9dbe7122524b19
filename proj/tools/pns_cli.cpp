// Command line front end: generate datasets, solve instances, collect label
// files, train and apply the predictor, and run the evaluation experiments.
// Every output is CSV or JSON; --no-times strips wall-clock fields so reruns
// with equal seeds are byte-identical.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pns/featurize.hpp"
#include "pns/gnn.hpp"
#include "pns/harness.hpp"
#include "pns/instgen.hpp"
#include "pns/labels.hpp"
#include "pns/milp.hpp"
#include "pns/search.hpp"
#include "pns/solver.hpp"

namespace {

using nlohmann::json;

// Accepts a JSON object as the --config file: top-level keys are subcommand
// names, each mapping to an object of flag values for that subcommand, e.g.
// {"generate": {"family": "independent_set", "count": 10}}. Flags given on
// the command line win over config values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    input >> j;
    if (!j.is_object()) throw CLI::FileError("config root must be a JSON object");
    std::vector<CLI::ConfigItem> out;
    flatten({}, j, out);
    return out;
  }

 private:
  static void flatten(const std::vector<std::string>& parents, const json& j,
                      std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        std::vector<std::string> deeper = parents;
        deeper.push_back(key);
        flatten(deeper, value, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(as_input(v));
      } else {
        item.inputs.push_back(as_input(value));
      }
      out.push_back(std::move(item));
    }
  }

  static std::string as_input(const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }
};

// stdout when path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    pns::write_text_file(path, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct SolverFlags {
  double time_limit = pns::kInf;
  int64_t node_limit = -1;
  int pool_size = 10;
  double rel_gap_tol = 1e-6;
  double int_tol = 1e-6;
  uint64_t seed = 0;
  bool no_diving = false;
  int dive_lp_limit = 30;

  pns::SolveParams to_params() const {
    pns::SolveParams p;
    p.time_limit = time_limit;
    p.node_limit = node_limit;
    p.pool_size = pool_size;
    p.rel_gap_tol = rel_gap_tol;
    p.int_tol = int_tol;
    p.seed = seed;
    p.enable_diving = !no_diving;
    p.dive_lp_limit = dive_lp_limit;
    return p;
  }
};

void add_solver_flags(CLI::App* sub, SolverFlags& f, double default_time = pns::kInf) {
  f.time_limit = default_time;
  sub->add_option("--time-limit", f.time_limit, "seconds per solve");
  sub->add_option("--node-limit", f.node_limit, "tree node budget, -1 for unlimited");
  sub->add_option("--pool-size", f.pool_size, "solution pool capacity");
  sub->add_option("--rel-gap-tol", f.rel_gap_tol, "relative optimality gap tolerance");
  sub->add_option("--int-tol", f.int_tol, "integrality tolerance");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_flag("--no-diving", f.no_diving, "disable the primal diving heuristic");
  sub->add_option("--dive-lp-limit", f.dive_lp_limit, "LP solves allowed per dive");
}

// Manifest stems in order, e.g. "independent_set_0000".
std::vector<std::string> manifest_stems(const std::string& dir) {
  const json manifest = json::parse(pns::read_text_file(dir + "/manifest.json"));
  std::vector<std::string> stems;
  for (const auto& entry : manifest.at("files")) {
    std::string file = entry.at("file").get<std::string>();
    if (file.size() > 4 && file.substr(file.size() - 4) == ".mps") {
      file.resize(file.size() - 4);
    }
    stems.push_back(std::move(file));
  }
  return stems;
}

std::string basename_stem(const std::string& path) {
  const size_t slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name.resize(dot);
  return name;
}

pns::GnnModel load_model(const std::string& path) {
  return pns::model_from_json(json::parse(pns::read_text_file(path)));
}

// Fills unset (negative) selection sizes from the family recorded by the
// generator.
void apply_family_defaults(pns::SearchConfig& cfg, const pns::MilpInstance& inst) {
  if (cfg.k0 >= 0 && cfg.k1 >= 0 && cfg.delta >= 0) return;
  const auto it = inst.meta.find("family");
  if (it == inst.meta.end()) {
    throw std::runtime_error(
        "instance carries no family tag; pass --k0/--k1/--delta explicitly");
  }
  const pns::SearchConfig def = pns::default_search_config(it->second, inst.num_binary);
  if (cfg.k0 < 0) cfg.k0 = def.k0;
  if (cfg.k1 < 0) cfg.k1 = def.k1;
  if (cfg.delta < 0) cfg.delta = def.delta;
}

int run(int argc, char** argv) {
  CLI::App app{"Predict-and-search toolkit for binary integer programs"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "JSON file with per-subcommand flag values, e.g. "
                 "{\"solve\": {\"time-limit\": 10}}");
  app.config_formatter(std::make_shared<JsonConfig>());

  // ---- generate ----------------------------------------------------------
  pns::GenSpec gen_spec;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("generate", "Write a seeded instance dataset with manifest");
  gen->add_option("--family", gen_spec.family, "independent_set or combinatorial_auction");
  gen->add_option("--nodes", gen_spec.nodes, "graph nodes (independent_set)");
  gen->add_option("--affinity", gen_spec.affinity, "edges per added node (independent_set)");
  gen->add_option("--items", gen_spec.items, "items for sale (combinatorial_auction)");
  gen->add_option("--bids", gen_spec.bids, "bids placed (combinatorial_auction)");
  gen->add_option("--seed", gen_spec.seed, "random seed");
  gen->add_option("--count", gen_spec.count, "number of instances");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->callback([&] {
    const std::vector<std::string> files = pns::write_dataset(gen_spec, gen_out);
    json j;
    j["dir"] = gen_out;
    j["count"] = files.size();
    j["files"] = files;
    std::cout << dump(j);
  });

  // ---- solve --------------------------------------------------------------
  std::string solve_instance, solve_out;
  SolverFlags solve_flags;
  bool solve_no_times = false;
  CLI::App* solve = app.add_subcommand("solve", "Solve one MPS instance exactly or to a budget");
  solve->add_option("--instance", solve_instance, "MPS file")->required();
  add_solver_flags(solve, solve_flags);
  solve->add_flag("--no-times", solve_no_times, "omit wall-clock fields from the output");
  solve->add_option("--out", solve_out, "output JSON path (default: stdout)");
  solve->callback([&] {
    const pns::MilpInstance inst = pns::read_instance_file(solve_instance);
    const pns::SolveResult r = pns::solve_milp(inst, solve_flags.to_params());
    emit(solve_out, dump(pns::solve_result_to_json(inst, r, !solve_no_times)));
  });

  // ---- collect -------------------------------------------------------------
  std::string collect_data, collect_instance, collect_out;
  double collect_temp = 1.0;
  SolverFlags collect_flags;
  CLI::App* collect =
      app.add_subcommand("collect", "Solve instances and write soft label files from the pools");
  collect->add_option("--data", collect_data, "dataset directory with manifest.json");
  collect->add_option("--instance", collect_instance, "single MPS file instead of --data");
  collect->add_option("--out", collect_out, "label output directory (default: the data dir)");
  collect->add_option("--temperature", collect_temp, "energy weighting temperature");
  add_solver_flags(collect, collect_flags, 10.0);
  collect->callback([&] {
    if (collect_data.empty() == collect_instance.empty()) {
      throw std::runtime_error("pass exactly one of --data or --instance");
    }
    std::vector<std::pair<std::string, pns::MilpInstance>> work;
    std::string out_dir = collect_out;
    if (!collect_data.empty()) {
      if (out_dir.empty()) out_dir = collect_data;
      for (const std::string& stem : manifest_stems(collect_data)) {
        work.emplace_back(stem, pns::read_instance_file(collect_data + "/" + stem + ".mps"));
      }
    } else {
      if (out_dir.empty()) throw std::runtime_error("--out is required with --instance");
      work.emplace_back(basename_stem(collect_instance),
                        pns::read_instance_file(collect_instance));
    }
    json skipped = json::array();
    int labeled = 0;
    for (const auto& [stem, inst] : work) {
      const pns::SolveResult r = pns::solve_milp(inst, collect_flags.to_params());
      if (r.pool.empty()) {
        skipped.push_back(stem);
        continue;
      }
      const pns::LabeledSample labels = pns::make_labels(r.pool, collect_temp);
      pns::write_text_file(out_dir + "/" + stem + ".labels.json",
                           dump(pns::labels_to_json(labels, pns::pool_digest(r.pool))));
      ++labeled;
    }
    json j;
    j["labeled"] = labeled;
    j["skipped"] = skipped;
    j["out"] = out_dir;
    std::cout << dump(j);
  });

  // ---- featurize ------------------------------------------------------------
  std::string feat_instance, feat_out;
  uint64_t feat_seed = 0;
  CLI::App* feat = app.add_subcommand("featurize", "Emit the bipartite graph encoding as JSON");
  feat->add_option("--instance", feat_instance, "MPS file")->required();
  feat->add_option("--seed", feat_seed, "accepted for interface uniformity; unused");
  feat->add_option("--out", feat_out, "output JSON path (default: stdout)");
  feat->callback([&] {
    const pns::MilpInstance inst = pns::read_instance_file(feat_instance);
    emit(feat_out, dump(pns::graph_to_json(pns::featurize(inst))));
  });

  // ---- train -----------------------------------------------------------------
  std::string train_data, train_valid, train_model_out, train_history_out;
  pns::TrainConfig train_cfg;
  CLI::App* train = app.add_subcommand("train", "Fit the predictor on collected label files");
  train->add_option("--data", train_data, "dataset directory with *.mps and *.labels.json")
      ->required();
  train->add_option("--valid-data", train_valid, "validation dataset directory");
  train->add_option("--epochs", train_cfg.epochs, "training epochs");
  train->add_option("--lr", train_cfg.lr, "Adam learning rate");
  train->add_option("--batch-size", train_cfg.batch_size, "minibatch size");
  train->add_option("--seed", train_cfg.seed, "init and shuffle seed");
  train->add_option("--hidden", train_cfg.hidden, "embedding width");
  train->add_option("--clip-norm", train_cfg.clip_norm, "global gradient norm cap, 0 disables");
  train->add_flag("--edge-embedding", train_cfg.use_edge_embedding,
                  "sum coefficient embeddings into the aggregation (off by default)");
  train->add_option("--model-out", train_model_out, "checkpoint JSON path")->required();
  train->add_option("--history-out", train_history_out, "loss curve CSV path");
  train->callback([&] {
    const auto load_set = [](const std::string& dir) {
      std::vector<pns::TrainSample> set;
      for (const std::string& stem : manifest_stems(dir)) {
        const pns::MilpInstance inst = pns::read_instance_file(dir + "/" + stem + ".mps");
        const std::string labels_path = dir + "/" + stem + ".labels.json";
        pns::LabeledSample labels;
        try {
          labels = pns::labels_from_json(json::parse(pns::read_text_file(labels_path)));
        } catch (const std::runtime_error&) {
          throw std::runtime_error("missing or unreadable " + labels_path +
                                   "; run `collect` on the dataset first");
        }
        if (labels.q != inst.num_binary) {
          throw std::runtime_error(labels_path + " does not match the instance binary count");
        }
        set.push_back(pns::TrainSample{pns::featurize(inst), labels.marginals});
      }
      return set;
    };
    const std::vector<pns::TrainSample> train_set = load_set(train_data);
    const std::vector<pns::TrainSample> valid_set =
        train_valid.empty() ? std::vector<pns::TrainSample>{} : load_set(train_valid);
    pns::TrainHistory hist;
    const pns::GnnModel model = pns::train_gnn(train_set, valid_set, train_cfg, &hist);
    pns::write_text_file(train_model_out, dump(pns::model_to_json(model)));
    if (!train_history_out.empty()) {
      pns::write_text_file(train_history_out, pns::history_to_csv(hist));
    }
    json j;
    j["model"] = train_model_out;
    j["train_instances"] = train_set.size();
    j["valid_instances"] = valid_set.size();
    j["best_epoch"] = hist.best_epoch;
    if (!hist.train_loss.empty()) {
      j["first_train_loss"] = hist.train_loss.front();
      j["final_train_loss"] = hist.train_loss.back();
    }
    if (!hist.valid_loss.empty()) j["final_valid_loss"] = hist.valid_loss.back();
    std::cout << dump(j);
  });

  // ---- predict -----------------------------------------------------------------
  std::string pred_model, pred_instance, pred_out;
  uint64_t pred_seed = 0;
  CLI::App* pred = app.add_subcommand("predict", "Emit predicted marginals for an instance");
  pred->add_option("--model", pred_model, "checkpoint JSON")->required();
  pred->add_option("--instance", pred_instance, "MPS file")->required();
  pred->add_option("--seed", pred_seed, "accepted for interface uniformity; unused");
  pred->add_option("--out", pred_out, "output JSON path (default: stdout)");
  pred->callback([&] {
    const pns::MilpInstance inst = pns::read_instance_file(pred_instance);
    const pns::GnnModel model = load_model(pred_model);
    json j;
    j["instance"] = inst.name;
    j["q"] = inst.num_binary;
    j["probs"] = pns::forward(model, pns::featurize(inst));
    emit(pred_out, dump(j));
  });

  // ---- search ---------------------------------------------------------------
  std::string search_model, search_instance, search_out, search_export;
  std::string search_mode = "search", search_form = "indicator";
  pns::SearchConfig search_cfg;
  search_cfg.k0 = search_cfg.k1 = search_cfg.delta = -1;  // negative: family defaults
  SolverFlags search_flags;
  bool search_no_times = false;
  CLI::App* search =
      app.add_subcommand("search", "Run the trust-region (or fixing) restricted solve once");
  search->add_option("--model", search_model, "checkpoint JSON")->required();
  search->add_option("--instance", search_instance, "MPS file")->required();
  search->add_option("--k0", search_cfg.k0, "components pinned toward 0 (default: family rule)");
  search->add_option("--k1", search_cfg.k1, "components pinned toward 1 (default: family rule)");
  search->add_option("--delta", search_cfg.delta, "ball radius (default: family rule)");
  search->add_option("--mode", search_mode, "search or fix");
  search->add_option("--formulation", search_form, "indicator or compact");
  search->add_option("--export-mps", search_export, "also write the restricted instance");
  search->add_flag("--no-times", search_no_times, "omit wall-clock fields from the output");
  search->add_option("--out", search_out, "output JSON path (default: stdout)");
  add_solver_flags(search, search_flags);
  search->callback([&] {
    const pns::MilpInstance inst = pns::read_instance_file(search_instance);
    const pns::GnnModel model = load_model(search_model);
    search_cfg.mode = pns::parse_search_mode(search_mode);
    search_cfg.formulation = pns::parse_trust_region_form(search_form);
    apply_family_defaults(search_cfg, inst);
    search_cfg.solver = search_flags.to_params();
    search_cfg.time_limit = search_flags.time_limit;
    pns::SearchDiagnostics diag;
    const pns::SolveResult r = pns::predict_and_search(inst, model, search_cfg, &diag);
    if (!search_export.empty()) {
      pns::write_text_file(search_export, pns::write_mps(diag.restricted));
    }
    json j = pns::solve_result_to_json(inst, r, !search_no_times);
    j["search"] = {{"k0", search_cfg.k0},
                   {"k1", search_cfg.k1},
                   {"delta", search_cfg.delta},
                   {"mode", to_string(search_cfg.mode)},
                   {"formulation", to_string(search_cfg.formulation)},
                   {"pinned_zero", diag.partial.zeros},
                   {"pinned_one", diag.partial.ones}};
    j["probs"] = diag.probs;
    emit(search_out, dump(j));
  });

  // ---- evaluate ---------------------------------------------------------------
  std::string eval_data, eval_model, eval_prefix;
  std::string eval_methods = "solve,ps_search,ps_fix";
  double eval_bks_limit = 60.0;
  int eval_k0 = -1, eval_k1 = -1, eval_delta = -1;
  SolverFlags eval_flags;
  bool eval_no_times = false;
  CLI::App* eval =
      app.add_subcommand("evaluate", "Compare methods across a dataset and emit CSV reports");
  eval->add_option("--data", eval_data, "dataset directory with manifest.json")->required();
  eval->add_option("--model", eval_model, "checkpoint JSON (needed by ps_* methods)");
  eval->add_option("--methods", eval_methods, "comma list from {solve, ps_search, ps_fix}");
  eval->add_option("--bks-limit", eval_bks_limit, "seconds for the reference solves");
  eval->add_option("--k0", eval_k0, "pinned-to-0 count for ps_* (default: family rule)");
  eval->add_option("--k1", eval_k1, "pinned-to-1 count for ps_* (default: family rule)");
  eval->add_option("--delta", eval_delta, "ball radius for ps_search (default: family rule)");
  eval->add_option("--out-prefix", eval_prefix,
                   "writes <prefix>.records.csv, .aggregates.csv, .curves.csv")
      ->required();
  eval->add_flag("--no-times", eval_no_times, "omit wall-clock fields from the CSVs");
  add_solver_flags(eval, eval_flags, 10.0);
  eval->callback([&] {
    pns::EvalSpec spec;
    spec.instances = pns::read_dataset_dir(eval_data);
    if (spec.instances.empty()) throw std::runtime_error("dataset is empty");
    spec.solver = eval_flags.to_params();
    spec.time_limit = eval_flags.time_limit;
    spec.bks_limit = eval_bks_limit;

    pns::SearchConfig base;
    base.k0 = eval_k0;
    base.k1 = eval_k1;
    base.delta = eval_delta;
    apply_family_defaults(base, spec.instances.front());

    pns::GnnModel model;
    bool model_loaded = false;
    std::stringstream tags(eval_methods);
    std::string tag;
    while (std::getline(tags, tag, ',')) {
      pns::EvalMethod m;
      m.tag = tag;
      if (tag == "solve") {
        m.kind = pns::EvalMethod::Kind::kSolve;
      } else if (tag == "ps_search" || tag == "ps_fix") {
        m.kind = pns::EvalMethod::Kind::kSearch;
        m.config = base;
        m.config.mode = tag == "ps_fix" ? pns::SearchMode::kFix : pns::SearchMode::kSearch;
        if (!model_loaded) {
          if (eval_model.empty()) throw std::runtime_error("--model is required for " + tag);
          model = load_model(eval_model);
          model_loaded = true;
        }
      } else {
        throw std::runtime_error("unknown method: " + tag);
      }
      spec.methods.push_back(std::move(m));
    }
    spec.model = model_loaded ? &model : nullptr;

    const pns::EvalReport report = pns::evaluate(spec);
    pns::write_text_file(eval_prefix + ".records.csv",
                         pns::records_to_csv(report.records, !eval_no_times));
    pns::write_text_file(eval_prefix + ".aggregates.csv",
                         pns::aggregates_to_csv(report.aggregates));
    pns::write_text_file(eval_prefix + ".curves.csv",
                         pns::curves_to_csv(report.records, !eval_no_times));
    std::cout << pns::report_text(report);
  });

  // ---- perturb -----------------------------------------------------------------
  std::string pert_instance, pert_out;
  pns::PerturbParams pert_params;
  std::vector<int> pert_flips = {0, 1, 2, 4, 8};
  SolverFlags pert_flags;
  CLI::App* pert = app.add_subcommand(
      "perturb", "Flip components of the optimum, repin, and measure feasibility decay");
  pert->add_option("--instance", pert_instance, "MPS file")->required();
  pert->add_option("--trials", pert_params.trials, "trials per flip count");
  pert->add_option("--flips", pert_flips, "flip counts to sweep")->delimiter(',');
  pert->add_option("--k0", pert_params.k0, "restrict pinning to k0 zeros (default: all)");
  pert->add_option("--k1", pert_params.k1, "restrict pinning to k1 ones (default: all)");
  pert->add_option("--out", pert_out, "output CSV path (default: stdout)");
  add_solver_flags(pert, pert_flags);
  pert->callback([&] {
    const pns::MilpInstance inst = pns::read_instance_file(pert_instance);
    pert_params.solver = pert_flags.to_params();
    pert_params.seed = pert_flags.seed;
    std::vector<std::pair<int, pns::PerturbResult>> curve;
    for (int flips : pert_flips) {
      pert_params.flips = flips;
      curve.emplace_back(flips, pns::perturb_experiment(inst, pert_params));
    }
    emit(pert_out, pns::perturb_to_csv(curve));
  });

  // ---- oracle -----------------------------------------------------------------
  std::string oracle_instance, oracle_out;
  uint64_t oracle_seed = 0;
  CLI::App* oracle =
      app.add_subcommand("oracle", "Exhaustively enumerate a small instance (q <= 24)");
  oracle->add_option("--instance", oracle_instance, "MPS file")->required();
  oracle->add_option("--seed", oracle_seed, "accepted for interface uniformity; unused");
  oracle->add_option("--out", oracle_out, "output JSON path (default: stdout)");
  oracle->callback([&] {
    const pns::MilpInstance inst = pns::read_instance_file(oracle_instance);
    const pns::BruteForceResult r = pns::brute_force(inst);
    json j;
    j["instance"] = inst.name;
    j["sense"] = inst.sense_flag == pns::ObjSense::kMax ? "max" : "min";
    j["feasible"] = r.feasible;
    j["num_feasible"] = r.num_feasible;
    j["num_optimal"] = r.num_optimal;
    if (r.feasible) {
      j["objective"] = inst.to_original_sense(r.best.objective);
      j["objective_min_form"] = r.best.objective;
      j["x"] = r.best.values;
    }
    emit(oracle_out, dump(j));
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
