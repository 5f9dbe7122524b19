#include "pns/instgen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "pns/rng.hpp"

namespace pns {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

}  // namespace

void GenSpec::validate() const {
  if (family != "independent_set" && family != "combinatorial_auction") {
    throw std::invalid_argument("unknown family '" + family + "'");
  }
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (family == "independent_set") {
    if (nodes < 2) throw std::invalid_argument("independent_set needs nodes >= 2");
    if (affinity < 1 || affinity >= nodes) {
      throw std::invalid_argument("affinity must satisfy 1 <= affinity < nodes");
    }
  } else {
    if (items < 1 || bids < 1) throw std::invalid_argument("items and bids must be >= 1");
  }
}

MilpInstance gen_independent_set(int nodes, int affinity, uint64_t seed) {
  if (nodes < 2 || affinity < 1 || affinity >= nodes) {
    throw std::invalid_argument("gen_independent_set: need nodes >= 2 and 1 <= affinity < nodes");
  }
  SplitMix64 rng(seed);

  std::vector<std::pair<int, int>> edges;
  // Endpoint multiset; drawing uniformly from it is degree-proportional.
  std::vector<int> repeated;
  auto add_edge = [&](int u, int v) {
    edges.emplace_back(u, v);
    repeated.push_back(u);
    repeated.push_back(v);
  };
  for (int u = 0; u < affinity; ++u) {
    for (int v = u + 1; v < affinity; ++v) add_edge(u, v);
  }
  std::vector<int> targets;
  for (int v = affinity; v < nodes; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < affinity) {
      int t;
      if (repeated.empty()) {
        t = static_cast<int>(rng.bounded(static_cast<uint64_t>(v)));
      } else {
        t = repeated[rng.bounded(repeated.size())];
      }
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    std::sort(targets.begin(), targets.end());
    for (int t : targets) add_edge(t, v);
  }

  MilpInstance inst;
  inst.name = "is_" + std::to_string(nodes) + "_" + std::to_string(affinity);
  inst.num_vars = nodes;
  inst.num_binary = nodes;
  inst.sense_flag = ObjSense::kMax;
  inst.objective.assign(nodes, -1.0);
  inst.lower.assign(nodes, 0.0);
  inst.upper.assign(nodes, 1.0);
  inst.var_kind.assign(nodes, VarKind::kBinary);
  inst.var_names.reserve(nodes);
  for (int v = 0; v < nodes; ++v) inst.var_names.push_back("x" + std::to_string(v));
  inst.rows.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    Row row;
    row.name = "e" + std::to_string(u) + "_" + std::to_string(v);
    row.coeffs = {{u, 1.0}, {v, 1.0}};
    row.rhs = 1.0;
    row.sense = RowSense::kLe;
    inst.rows.push_back(std::move(row));
  }
  inst.meta["family"] = "independent_set";
  inst.meta["nodes"] = std::to_string(nodes);
  inst.meta["affinity"] = std::to_string(affinity);
  inst.meta["seed"] = std::to_string(seed);
  inst.meta["rng"] = "splitmix64";
  inst.validate();
  return inst;
}

MilpInstance gen_combinatorial_auction(int items, int bids, uint64_t seed) {
  if (items < 1 || bids < 1) {
    throw std::invalid_argument("gen_combinatorial_auction: items and bids must be >= 1");
  }
  SplitMix64 rng(seed);
  const double p = std::min(1.0, 3.0 / items);

  std::vector<std::vector<int>> bundles(bids);
  std::vector<double> prices(bids);
  for (int j = 0; j < bids; ++j) {
    for (int i = 0; i < items; ++i) {
      if (rng.uniform() < p) bundles[j].push_back(i);
    }
    if (bundles[j].empty()) bundles[j].push_back(static_cast<int>(rng.bounded(items)));
    prices[j] = static_cast<double>(bundles[j].size()) * (1.0 + rng.uniform(-0.1, 0.1));
  }

  MilpInstance inst;
  inst.name = "ca_" + std::to_string(items) + "_" + std::to_string(bids);
  inst.num_vars = bids;
  inst.num_binary = bids;
  inst.sense_flag = ObjSense::kMax;
  inst.objective.reserve(bids);
  for (double price : prices) inst.objective.push_back(-price);
  inst.lower.assign(bids, 0.0);
  inst.upper.assign(bids, 1.0);
  inst.var_kind.assign(bids, VarKind::kBinary);
  inst.var_names.reserve(bids);
  for (int j = 0; j < bids; ++j) inst.var_names.push_back("bid" + std::to_string(j));
  inst.rows.reserve(items);
  for (int i = 0; i < items; ++i) {
    Row row;
    row.name = "item" + std::to_string(i);
    for (int j = 0; j < bids; ++j) {
      if (std::find(bundles[j].begin(), bundles[j].end(), i) != bundles[j].end()) {
        row.coeffs[j] = 1.0;
      }
    }
    row.rhs = 1.0;
    row.sense = RowSense::kLe;
    inst.rows.push_back(std::move(row));
  }
  inst.meta["family"] = "combinatorial_auction";
  inst.meta["items"] = std::to_string(items);
  inst.meta["bids"] = std::to_string(bids);
  inst.meta["seed"] = std::to_string(seed);
  inst.meta["rng"] = "splitmix64";
  inst.meta["variant"] = "simplified bundle/price generator";
  inst.validate();
  return inst;
}

MilpInstance generate_instance(const GenSpec& spec, int index) {
  spec.validate();
  if (index < 0 || index >= spec.count) throw std::invalid_argument("instance index out of range");
  const uint64_t sub = substream_seed(spec.seed, static_cast<uint64_t>(index));
  MilpInstance inst = spec.family == "independent_set"
                          ? gen_independent_set(spec.nodes, spec.affinity, sub)
                          : gen_combinatorial_auction(spec.items, spec.bids, sub);
  inst.name += "_" + std::to_string(index);
  inst.meta["index"] = std::to_string(index);
  return inst;
}

std::vector<std::string> write_dataset(const GenSpec& spec, const std::string& dir) {
  spec.validate();
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["family"] = spec.family;
  manifest["seed"] = spec.seed;
  manifest["count"] = spec.count;
  manifest["rng"] = "splitmix64";
  if (spec.family == "independent_set") {
    manifest["nodes"] = spec.nodes;
    manifest["affinity"] = spec.affinity;
  } else {
    manifest["items"] = spec.items;
    manifest["bids"] = spec.bids;
    manifest["variant"] = "simplified bundle/price generator";
  }
  nlohmann::json files = nlohmann::json::array();
  std::vector<std::string> names;
  for (int index = 0; index < spec.count; ++index) {
    MilpInstance inst = generate_instance(spec, index);
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_%04d.mps", index);
    const std::string file = spec.family + suffix;
    write_text(std::filesystem::path(dir) / file, write_mps(inst));
    files.push_back({{"index", index},
                     {"file", file},
                     {"seed", substream_seed(spec.seed, static_cast<uint64_t>(index))},
                     {"num_vars", inst.num_vars},
                     {"num_rows", inst.num_rows()}});
    names.push_back(file);
  }
  manifest["files"] = std::move(files);
  write_text(std::filesystem::path(dir) / "manifest.json", manifest.dump(2) + "\n");
  return names;
}

}  // namespace pns
