#include "pns/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pns/featurize.hpp"
#include "pns/rng.hpp"

namespace pns {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_cell(double v) { return std::isnan(v) ? std::string() : fmt(v); }

// Per-record step function of gap_rel over the chosen axis. Times before the
// first incumbent fall back to max(1, first gap), keeping steps monotone.
struct GapCurve {
  std::vector<double> at;    // axis positions (seconds or nodes)
  std::vector<double> gap;   // gap_rel after the event at the same index
  double sentinel = 1.0;

  double value_at(double t) const {
    double v = sentinel;
    for (size_t i = 0; i < at.size() && at[i] <= t; ++i) v = gap[i];
    return v;
  }
};

GapCurve record_curve(const EvalRecord& rec, bool use_seconds) {
  GapCurve c;
  for (const IncumbentEvent& e : rec.curve) {
    c.at.push_back(use_seconds ? e.seconds : static_cast<double>(e.nodes));
    c.gap.push_back(gap_rel(e.objective, rec.bks));
  }
  if (!c.gap.empty()) c.sentinel = std::max(1.0, c.gap.front());
  return c;
}

}  // namespace

double gap_abs(double obj, double bks) { return std::abs(obj - bks); }

double gap_rel(double obj, double bks) { return std::abs(obj - bks) / (std::abs(bks) + 1e-10); }

double gain_percent(double gap_base, double gap_ours) {
  if (gap_base < 0.0) throw std::invalid_argument("baseline gap must be non-negative");
  if (gap_base == 0.0) {
    return gap_ours == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return (gap_base - gap_ours) / gap_base * 100.0;
}

BksResult compute_bks(const std::vector<MilpInstance>& instances, double long_limit,
                      const SolveParams& base) {
  BksResult out;
  for (const MilpInstance& inst : instances) {
    if (out.bks.count(inst.name) > 0) {
      throw std::invalid_argument("duplicate instance id: " + inst.name);
    }
    SolveParams p = base;
    p.time_limit = long_limit;
    const SolveResult r = solve_milp(inst, p);
    if (r.incumbent.has_value()) {
      out.bks[inst.name] = inst.to_original_sense(r.incumbent->objective);
    } else {
      out.excluded.push_back(inst.name);
    }
  }
  return out;
}

EvalReport evaluate(const EvalSpec& spec) {
  if (spec.instances.empty()) throw std::invalid_argument("no instances to evaluate");
  if (spec.methods.empty()) throw std::invalid_argument("no methods to evaluate");
  {
    std::set<std::string> tags;
    for (const EvalMethod& m : spec.methods) {
      if (!tags.insert(m.tag).second) throw std::invalid_argument("duplicate method tag: " + m.tag);
      if (m.kind == EvalMethod::Kind::kSearch && spec.model == nullptr) {
        throw std::invalid_argument("method " + m.tag + " needs a model");
      }
    }
  }

  EvalReport report;
  report.bks = compute_bks(spec.instances, spec.bks_limit, spec.solver);
  const std::set<std::string> excluded(report.bks.excluded.begin(), report.bks.excluded.end());
  for (const std::string& id : report.bks.excluded) {
    report.warnings.push_back("no feasible reference for " + id + "; instance skipped");
  }

  // Raw per-(instance, method) outcomes with min-form objectives; the BKS
  // update pass has to see all of them before any gap is final.
  struct Raw {
    const MilpInstance* inst;
    const EvalMethod* method;
    SolveResult result;
  };
  std::vector<Raw> raw;
  std::map<std::string, double> bks_min;  // id -> reference in min form
  for (const auto& [id, value] : report.bks.bks) bks_min[id] = value;
  for (const MilpInstance& inst : spec.instances) {
    if (excluded.count(inst.name) > 0) continue;
    bks_min[inst.name] = inst.sense_flag == ObjSense::kMax ? -report.bks.bks.at(inst.name)
                                                           : report.bks.bks.at(inst.name);
    for (const EvalMethod& method : spec.methods) {
      SolveResult r;
      if (method.kind == EvalMethod::Kind::kSolve) {
        SolveParams p = spec.solver;
        p.time_limit = spec.time_limit;
        r = solve_milp(inst, p);
      } else {
        SearchConfig cfg = method.config;
        cfg.solver = spec.solver;
        cfg.time_limit = spec.time_limit;
        r = predict_and_search(inst, *spec.model, cfg);
      }
      if (r.incumbent.has_value()) {
        double& ref = bks_min.at(inst.name);
        ref = std::min(ref, r.incumbent->objective);
      }
      raw.push_back(Raw{&inst, &method, std::move(r)});
    }
  }

  for (const Raw& entry : raw) {
    const MilpInstance& inst = *entry.inst;
    EvalRecord rec;
    rec.instance_id = inst.name;
    rec.method = entry.method->tag;
    rec.status = to_string(entry.result.status);
    rec.bks = inst.to_original_sense(bks_min.at(inst.name));
    rec.wall_seconds = entry.result.stats.wall_seconds;
    if (entry.result.incumbent.has_value()) {
      rec.has_incumbent = true;
      rec.obj = inst.to_original_sense(entry.result.incumbent->objective);
      rec.gap_abs_val = gap_abs(rec.obj, rec.bks);
      rec.gap_rel_val = gap_rel(rec.obj, rec.bks);
    } else {
      rec.obj = kNan;
      rec.gap_abs_val = kNan;
      rec.gap_rel_val = 1.0;
    }
    rec.curve = entry.result.events;
    for (IncumbentEvent& e : rec.curve) e.objective = inst.to_original_sense(e.objective);
    report.records.push_back(std::move(rec));
  }

  for (const EvalMethod& method : spec.methods) {
    MethodAggregate agg;
    agg.method = method.tag;
    double sum_obj = 0.0, sum_abs = 0.0, sum_rel = 0.0;
    for (const EvalRecord& rec : report.records) {
      if (rec.method != method.tag) continue;
      ++agg.instances;
      sum_rel += rec.gap_rel_val;
      if (rec.has_incumbent) {
        ++agg.with_incumbent;
        sum_obj += rec.obj;
        sum_abs += rec.gap_abs_val;
      }
    }
    if (agg.instances > 0) agg.avg_gap_rel = sum_rel / agg.instances;
    if (agg.with_incumbent > 0) {
      agg.avg_obj = sum_obj / agg.with_incumbent;
      agg.avg_gap_abs = sum_abs / agg.with_incumbent;
    }
    report.aggregates.push_back(agg);
  }
  for (MethodAggregate& agg : report.aggregates) {
    agg.gain_vs_baseline = gain_percent(report.aggregates.front().avg_gap_abs, agg.avg_gap_abs);
  }
  return report;
}

std::string records_to_csv(const std::vector<EvalRecord>& records, bool include_times) {
  std::ostringstream out;
  out << "instance,method,status,obj,bks,gap_abs,gap_rel";
  if (include_times) out << ",wall_seconds";
  out << "\n";
  for (const EvalRecord& r : records) {
    out << r.instance_id << "," << r.method << "," << r.status << "," << fmt_cell(r.obj) << ","
        << fmt(r.bks) << "," << fmt_cell(r.gap_abs_val) << "," << fmt(r.gap_rel_val);
    if (include_times) out << "," << fmt(r.wall_seconds);
    out << "\n";
  }
  return out.str();
}

std::string aggregates_to_csv(const std::vector<MethodAggregate>& aggregates) {
  std::ostringstream out;
  out << "method,instances,with_incumbent,avg_obj,avg_gap_abs,avg_gap_rel,gain_pct\n";
  for (const MethodAggregate& a : aggregates) {
    out << a.method << "," << a.instances << "," << a.with_incumbent << "," << fmt(a.avg_obj)
        << "," << fmt(a.avg_gap_abs) << "," << fmt(a.avg_gap_rel) << ","
        << fmt(a.gain_vs_baseline) << "\n";
  }
  return out.str();
}

std::string curves_to_csv(const std::vector<EvalRecord>& records, bool include_times) {
  std::ostringstream out;
  out << "method," << (include_times ? "seconds" : "nodes") << ",mean_gap_rel\n";
  std::vector<std::string> order;
  for (const EvalRecord& r : records) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  for (const std::string& method : order) {
    std::vector<GapCurve> curves;
    std::set<double> ticks;
    for (const EvalRecord& r : records) {
      if (r.method != method) continue;
      curves.push_back(record_curve(r, include_times));
      for (double t : curves.back().at) ticks.insert(t);
    }
    if (curves.empty()) continue;
    for (double t : ticks) {
      double sum = 0.0;
      for (const GapCurve& c : curves) sum += c.value_at(t);
      out << method << "," << fmt(t) << "," << fmt(sum / curves.size()) << "\n";
    }
  }
  return out.str();
}

std::string report_text(const EvalReport& report) {
  std::ostringstream out;
  out << "method                n  inc  avg_obj        avg_gap_abs    avg_gap_rel    gain%\n";
  for (const MethodAggregate& a : report.aggregates) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-20s %4d %4d  %-14.6g %-14.6g %-14.6g %.1f\n",
                  a.method.c_str(), a.instances, a.with_incumbent, a.avg_obj, a.avg_gap_abs,
                  a.avg_gap_rel, a.gain_vs_baseline);
    out << line;
  }
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  return out.str();
}

PerturbResult perturb_experiment(const MilpInstance& inst, const PerturbParams& params) {
  const int q = inst.num_binary;
  if (params.flips < 0 || params.flips > q) {
    throw std::invalid_argument("flips must lie in [0, q]");
  }
  if (params.trials < 1) throw std::invalid_argument("trials must be positive");

  const SolveResult base = solve_milp(inst, params.solver);
  if (base.status != SolveStatus::kOptimal) {
    throw std::runtime_error("perturbation needs the instance solved to optimality first");
  }
  const double optimum = base.incumbent->objective;
  std::vector<int> star(q);
  for (int d = 0; d < q; ++d) star[d] = base.incumbent->values[d] > 0.5 ? 1 : 0;

  PerturbResult out;
  out.trials = params.trials;
  out.gap_min = kInf;
  double gap_sum = 0.0;
  std::vector<int> idx(q);
  for (int trial = 0; trial < params.trials; ++trial) {
    SplitMix64 rng(substream_seed(params.seed, trial));
    for (int d = 0; d < q; ++d) idx[d] = d;
    for (int pick = 0; pick < params.flips; ++pick) {
      const int at = pick + static_cast<int>(rng.bounded(static_cast<uint64_t>(q - pick)));
      std::swap(idx[pick], idx[at]);
    }
    std::vector<int> trial_x = star;
    for (int pick = 0; pick < params.flips; ++pick) trial_x[idx[pick]] ^= 1;

    PartialSolution ps;
    if (params.k0 < 0 || params.k1 < 0) {
      for (int d = 0; d < q; ++d) (trial_x[d] == 0 ? ps.zeros : ps.ones).push_back(d);
    } else {
      std::vector<double> probs(trial_x.begin(), trial_x.end());
      ps = select_partial(probs, params.k0, params.k1);
    }
    const MilpInstance fixed = build_fixing(inst, ps);

    bool all_pinned = true;
    for (int d = 0; d < fixed.num_vars; ++d) all_pinned = all_pinned && fixed.lower[d] == fixed.upper[d];

    bool feasible = false;
    double objective = 0.0;
    if (all_pinned) {
      // Nothing left to optimize: the pinned point is the whole problem.
      feasible = check_feasible(fixed, fixed.lower);
      if (feasible) objective = fixed.objective_value(fixed.lower);
    } else {
      const SolveResult r = solve_milp(fixed, params.solver);
      if (r.status == SolveStatus::kOptimal) {
        feasible = true;
        objective = r.incumbent->objective;
      } else if (r.status != SolveStatus::kInfeasible) {
        throw std::runtime_error("perturbation trial stopped before optimality; raise the budget");
      }
    }
    if (feasible) {
      ++out.feasible_trials;
      const double gap = std::max(0.0, objective - optimum);
      out.gap_min = std::min(out.gap_min, gap);
      out.gap_max = std::max(out.gap_max, gap);
      gap_sum += gap;
    }
  }
  out.infeasible_pct = 100.0 * (out.trials - out.feasible_trials) / out.trials;
  if (out.feasible_trials > 0) {
    out.gap_avg = gap_sum / out.feasible_trials;
  } else {
    out.gap_min = 0.0;
  }
  return out;
}

std::string perturb_to_csv(const std::vector<std::pair<int, PerturbResult>>& by_flips) {
  std::ostringstream out;
  out << "flips,trials,feasible_trials,infeasible_pct,gap_min,gap_avg,gap_max\n";
  for (const auto& [flips, r] : by_flips) {
    out << flips << "," << r.trials << "," << r.feasible_trials << "," << fmt(r.infeasible_pct)
        << "," << fmt(r.gap_min) << "," << fmt(r.gap_avg) << "," << fmt(r.gap_max) << "\n";
  }
  return out.str();
}

TrainSample collect_training_sample(const MilpInstance& inst, const SolveParams& params,
                                    double temperature) {
  const SolveResult r = solve_milp(inst, params);
  if (r.pool.empty()) {
    throw std::runtime_error("no feasible solution collected for " + inst.name);
  }
  const std::vector<double> weights = solution_weights(r.pool, temperature);
  return TrainSample{featurize(inst), marginals(r.pool, weights)};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("short write to " + path);
}

MilpInstance read_instance_file(const std::string& path) {
  return parse_mps(read_text_file(path));
}

std::vector<MilpInstance> read_dataset_dir(const std::string& dir) {
  const nlohmann::json manifest = nlohmann::json::parse(read_text_file(dir + "/manifest.json"));
  std::vector<MilpInstance> out;
  for (const auto& entry : manifest.at("files")) {
    out.push_back(read_instance_file(dir + "/" + entry.at("file").get<std::string>()));
  }
  return out;
}

nlohmann::json solve_result_to_json(const MilpInstance& inst, const SolveResult& result,
                                    bool include_times) {
  nlohmann::json j;
  j["instance"] = inst.name;
  j["sense"] = inst.sense_flag == ObjSense::kMax ? "max" : "min";
  j["status"] = to_string(result.status);
  j["bound_min_form"] = result.bound;
  j["bound"] = inst.to_original_sense(result.bound);
  if (result.incumbent.has_value()) {
    j["objective"] = inst.to_original_sense(result.incumbent->objective);
    j["objective_min_form"] = result.incumbent->objective;
    j["gap_to_bound"] = result.gap_to_bound();
    j["values"] = result.incumbent->values;
  }
  nlohmann::json stats;
  stats["nodes"] = result.stats.nodes;
  stats["lp_solves"] = result.stats.lp_solves;
  stats["lp_iterations"] = result.stats.lp_iterations;
  stats["dives"] = result.stats.dives;
  if (include_times) stats["wall_seconds"] = result.stats.wall_seconds;
  j["stats"] = std::move(stats);
  nlohmann::json events = nlohmann::json::array();
  for (const IncumbentEvent& e : result.events) {
    nlohmann::json je;
    je["nodes"] = e.nodes;
    je["objective"] = inst.to_original_sense(e.objective);
    if (include_times) je["seconds"] = e.seconds;
    events.push_back(std::move(je));
  }
  j["events"] = std::move(events);
  nlohmann::json pool = nlohmann::json::array();
  for (const PoolEntry& e : result.pool.entries()) {
    pool.push_back({{"objective", inst.to_original_sense(e.objective)}, {"x", e.x}});
  }
  j["pool"] = std::move(pool);
  return j;
}

}  // namespace pns
