#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pns/milp.hpp"

namespace pns {

// Describes one dataset of generated instances. Generation is a pure
// function of (family, size parameters, seed, index).
struct GenSpec {
  std::string family = "independent_set";  // or "combinatorial_auction"
  int nodes = 150;                         // independent set
  int affinity = 4;                        // edges per new node
  int items = 30;                          // combinatorial auction
  int bids = 80;
  uint64_t seed = 0;
  int count = 1;

  void validate() const;
};

// Maximum independent set on a Barabasi-Albert graph grown from an initial
// clique of `affinity` nodes. Stored in canonical minimization form with
// sense_flag=max: minimize -sum x_v subject to x_u + x_v <= 1 per edge.
MilpInstance gen_independent_set(int nodes, int affinity, uint64_t seed);

// Set-packing auction: each bid draws a random bundle (every item included
// with probability 3/items, at least one item) and a price proportional to
// the bundle size; maximize total price subject to one winner per item.
MilpInstance gen_combinatorial_auction(int items, int bids, uint64_t seed);

// Instance `index` of the dataset, seeded with substream_seed(seed, index).
MilpInstance generate_instance(const GenSpec& spec, int index);

// Writes `<family>_<index>.mps` for every index plus a manifest.json with
// the generator parameters and per-file metadata. Returns the file names
// in order.
std::vector<std::string> write_dataset(const GenSpec& spec, const std::string& dir);

}  // namespace pns
