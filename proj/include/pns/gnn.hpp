#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pns/featurize.hpp"

namespace pns {

struct TrainConfig {
  double lr = 0.003;
  int batch_size = 8;
  int epochs = 100;
  uint64_t seed = 0;
  double clip_norm = 0.0;  // 0 disables clipping
  double eps = 1e-7;       // prediction clamp for the log terms
  int hidden = 64;         // embedding width of the freshly initialized model
  bool use_edge_embedding = false;

  void validate() const;
};

struct Linear {
  Eigen::MatrixXd W;  // out x in
  Eigen::MatrixXd b;  // out x 1
};

// Two affine layers, ReLU after each.
struct Mlp2 {
  Linear l1;  // 2*hidden -> hidden
  Linear l2;  // hidden -> hidden
};

// Bipartite GNN over (constraint, variable) nodes: feature embeddings with
// layer normalization, two interleaved half-convolution rounds (constraints
// aggregate variables, then variables aggregate constraints), and a sigmoid
// head over the binary variables. All parameters are float64.
struct GnnModel {
  int var_in = kVarFeatureCount;
  int con_in = kConFeatureCount;
  int hidden = 64;
  // Optional extension: add an embedded coefficient to each neighbor term.
  // Off by default; the plain neighbor-state sum trains noticeably faster on
  // the small-instance regime this model targets.
  bool use_edge_embedding = false;
  uint64_t seed = 0;

  Linear embed_var;
  Eigen::MatrixXd ln_var_gamma, ln_var_beta;  // hidden x 1
  Linear embed_con;
  Eigen::MatrixXd ln_con_gamma, ln_con_beta;
  Linear embed_edge;  // 1 -> hidden
  std::array<Mlp2, 2> conv_c;
  std::array<Mlp2, 2> conv_v;
  Linear head1;  // hidden -> hidden (ReLU)
  Linear head2;  // hidden -> 1 (sigmoid applied outside)
};

// Xavier-uniform weights, zero biases, unit layer-norm gains, from an
// internal deterministic generator.
GnnModel make_model(uint64_t seed, int hidden = 64, bool use_edge_embedding = false,
                    int var_in = kVarFeatureCount, int con_in = kConFeatureCount);

// Same shapes, every tensor zero. Used for gradients and optimizer state.
GnnModel zeros_like(const GnnModel& model);

// Visits every parameter tensor in a fixed order shared by initialization,
// the optimizer, serialization and gradient checks.
void for_each_param(GnnModel& model,
                    const std::function<void(const std::string&, Eigen::MatrixXd&)>& fn);
void for_each_param(const GnnModel& model,
                    const std::function<void(const std::string&, const Eigen::MatrixXd&)>& fn);

// Probabilities for the q binary variables, each in (0,1).
std::vector<double> forward(const GnnModel& model, const BipartiteGraph& graph);

// Soft-target binary cross entropy, summed over coordinates. Predictions are
// clamped to [eps, 1-eps] before the logs.
double bce_loss(std::span<const double> pred, std::span<const double> target, double eps = 1e-7);

// Sum of target entropies: the exact lower bound of bce_loss over pred.
double entropy_lower_bound(std::span<const double> target);

// Accumulates scale * d(sample loss)/d(theta) into grad and returns the
// sample loss. Gradients are exact reverse-mode derivatives; the sigmoid and
// the cross entropy are fused (dL/dz = sigmoid(z) - target).
double backward(const GnnModel& model, const BipartiteGraph& graph,
                std::span<const double> target, GnnModel& grad, double scale, double eps = 1e-7);

struct TrainSample {
  BipartiteGraph graph;
  std::vector<double> target;  // size q
};

struct TrainHistory {
  std::vector<double> train_loss;  // one entry per epoch, full-pass evaluation
  std::vector<double> valid_loss;  // empty when no validation set
  int best_epoch = -1;             // epoch of the returned snapshot
};

// Mean sample loss over a dataset under a frozen model.
double dataset_loss(const GnnModel& model, const std::vector<TrainSample>& samples,
                    double eps = 1e-7);

// Adam (0.9, 0.999, 1e-8) over shuffled mini-batches; the returned model is
// the best-validation snapshot (best-training when valid is empty).
GnnModel train_gnn(const std::vector<TrainSample>& train_set,
                   const std::vector<TrainSample>& valid_set, const TrainConfig& cfg,
                   TrainHistory* history = nullptr);

nlohmann::json model_to_json(const GnnModel& model);
GnnModel model_from_json(const nlohmann::json& j);

std::string history_to_csv(const TrainHistory& history);

}  // namespace pns
