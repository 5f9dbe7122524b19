#include "pns/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pns/rng.hpp"

namespace pns {

namespace {

constexpr double kLnEps = 1e-5;  // layer-norm variance floor

Eigen::MatrixXd xavier(SplitMix64& rng, int out, int in) {
  const double limit = std::sqrt(6.0 / (in + out));
  Eigen::MatrixXd w(out, in);
  for (int r = 0; r < out; ++r) {
    for (int c = 0; c < in; ++c) w(r, c) = rng.uniform(-limit, limit);
  }
  return w;
}

Linear make_linear(SplitMix64& rng, int out, int in) {
  return Linear{xavier(rng, out, in), Eigen::MatrixXd::Zero(out, 1)};
}

// y = x W^T + 1 b^T, rows are samples.
Eigen::MatrixXd affine(const Eigen::MatrixXd& x, const Linear& lin) {
  return (x * lin.W.transpose()).rowwise() + lin.b.col(0).transpose();
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

// dX for y = relu(x): gradient is zero at and below zero.
Eigen::MatrixXd relu_backward(const Eigen::MatrixXd& dy, const Eigen::MatrixXd& x_pre) {
  return (x_pre.array() > 0.0).select(dy, 0.0);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct LnTape {
  Eigen::MatrixXd xhat;   // rows normalized
  Eigen::VectorXd istd;   // 1/sqrt(var + eps) per row
};

Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& gamma,
                           const Eigen::MatrixXd& beta, LnTape& tape) {
  const Eigen::Index rows = x.rows(), cols = x.cols();
  tape.xhat.resize(rows, cols);
  tape.istd.resize(rows);
  Eigen::MatrixXd y(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mu = x.row(r).mean();
    const double var = (x.row(r).array() - mu).square().mean();
    const double istd = 1.0 / std::sqrt(var + kLnEps);
    tape.istd[r] = istd;
    tape.xhat.row(r) = (x.row(r).array() - mu) * istd;
    y.row(r) = tape.xhat.row(r).cwiseProduct(gamma.col(0).transpose()) + beta.col(0).transpose();
  }
  return y;
}

Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& dy, const LnTape& tape,
                                    const Eigen::MatrixXd& gamma, Eigen::MatrixXd& dgamma,
                                    Eigen::MatrixXd& dbeta) {
  const Eigen::Index rows = dy.rows(), cols = dy.cols();
  Eigen::MatrixXd dx(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    dgamma.col(0) += dy.row(r).cwiseProduct(tape.xhat.row(r)).transpose();
    dbeta.col(0) += dy.row(r).transpose();
    const Eigen::RowVectorXd dxhat = dy.row(r).cwiseProduct(gamma.col(0).transpose());
    const double mean_dxhat = dxhat.mean();
    const double mean_dxhat_xhat = dxhat.cwiseProduct(tape.xhat.row(r)).mean();
    dx.row(r) = tape.istd[r] *
                (dxhat.array() - mean_dxhat - tape.xhat.row(r).array() * mean_dxhat_xhat);
  }
  return dx;
}

struct MlpTape {
  Eigen::MatrixXd x;    // concat input
  Eigen::MatrixXd a;    // l1 pre-activation
  Eigen::MatrixXd h1;   // l1 post-ReLU
  Eigen::MatrixXd b;    // l2 pre-activation
};

Eigen::MatrixXd mlp2(const Eigen::MatrixXd& x, const Mlp2& mlp, MlpTape& tape) {
  tape.x = x;
  tape.a = affine(x, mlp.l1);
  tape.h1 = relu(tape.a);
  tape.b = affine(tape.h1, mlp.l2);
  return relu(tape.b);
}

// Returns dX and accumulates parameter gradients.
Eigen::MatrixXd mlp2_backward(const Eigen::MatrixXd& dy, const Mlp2& mlp, const MlpTape& tape,
                              Mlp2& grad) {
  const Eigen::MatrixXd db = relu_backward(dy, tape.b);
  grad.l2.W.noalias() += db.transpose() * tape.h1;
  grad.l2.b.col(0) += db.colwise().sum().transpose();
  const Eigen::MatrixXd dh1 = db * mlp.l2.W;
  const Eigen::MatrixXd da = relu_backward(dh1, tape.a);
  grad.l1.W.noalias() += da.transpose() * tape.x;
  grad.l1.b.col(0) += da.colwise().sum().transpose();
  return da * mlp.l1.W;
}

// Everything the backward pass needs from one forward evaluation.
struct Tape {
  Eigen::MatrixXd hv_pre, hc_pre;
  LnTape ln_v, ln_c;
  Eigen::MatrixXd hv0, hc0;  // post layer-norm embeddings
  Eigen::MatrixXd ee;        // edge embeddings (0 x H when disabled)
  std::array<MlpTape, 2> tc, tv;
  std::array<Eigen::MatrixXd, 2> hc, hv;  // states after each layer
  Eigen::MatrixXd ah, h1h;                // head hidden
  Eigen::VectorXd z, prob;                // logits and sigmoid outputs (q)
};

void check_dims(const GnnModel& model, const BipartiteGraph& g) {
  if (g.var_feats.cols() != model.var_in || g.con_feats.cols() != model.con_in) {
    throw std::invalid_argument("graph feature widths disagree with the model");
  }
  if (g.var_feats.rows() != g.n || g.con_feats.rows() != g.m) {
    throw std::invalid_argument("graph matrices disagree with n/m");
  }
  for (const EdgeEntry& e : g.edges) {
    if (e.row < 0 || e.row >= g.m || e.col < 0 || e.col >= g.n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
  }
}

void run_forward(const GnnModel& model, const BipartiteGraph& g, Tape& t) {
  check_dims(model, g);
  const int H = model.hidden;
  const int E = static_cast<int>(g.edges.size());

  t.hv_pre = affine(g.var_feats, model.embed_var);
  t.hv0 = layer_norm(t.hv_pre, model.ln_var_gamma, model.ln_var_beta, t.ln_v);
  t.hc_pre = affine(g.con_feats, model.embed_con);
  t.hc0 = layer_norm(t.hc_pre, model.ln_con_gamma, model.ln_con_beta, t.ln_c);

  if (model.use_edge_embedding) {
    t.ee.resize(E, H);
    const Eigen::RowVectorXd w = model.embed_edge.W.col(0).transpose();
    const Eigen::RowVectorXd b = model.embed_edge.b.col(0).transpose();
    for (int e = 0; e < E; ++e) t.ee.row(e) = g.edges[e].coeff * w + b;
  } else {
    t.ee.resize(0, H);
  }

  const Eigen::MatrixXd* prev_v = &t.hv0;
  const Eigen::MatrixXd* prev_c = &t.hc0;
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXd sc = Eigen::MatrixXd::Zero(g.m, H);
    for (int e = 0; e < E; ++e) {
      sc.row(g.edges[e].row) += prev_v->row(g.edges[e].col);
      if (model.use_edge_embedding) sc.row(g.edges[e].row) += t.ee.row(e);
    }
    Eigen::MatrixXd xc(g.m, 2 * H);
    xc << *prev_c, sc;
    t.hc[k] = mlp2(xc, model.conv_c[k], t.tc[k]);

    Eigen::MatrixXd sv = Eigen::MatrixXd::Zero(g.n, H);
    for (int e = 0; e < E; ++e) {
      sv.row(g.edges[e].col) += t.hc[k].row(g.edges[e].row);
      if (model.use_edge_embedding) sv.row(g.edges[e].col) += t.ee.row(e);
    }
    Eigen::MatrixXd xv(g.n, 2 * H);
    xv << *prev_v, sv;
    t.hv[k] = mlp2(xv, model.conv_v[k], t.tv[k]);

    prev_c = &t.hc[k];
    prev_v = &t.hv[k];
  }

  const Eigen::MatrixXd binaries = t.hv[1].topRows(g.q);
  t.ah = affine(binaries, model.head1);
  t.h1h = relu(t.ah);
  t.z = (t.h1h * model.head2.W.transpose()).col(0) + Eigen::VectorXd::Constant(g.q, model.head2.b(0, 0));
  t.prob.resize(g.q);
  for (int d = 0; d < g.q; ++d) t.prob[d] = sigmoid(t.z[d]);
}

}  // namespace

void TrainConfig::validate() const {
  if (lr < 0.0) throw std::invalid_argument("lr must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (eps <= 0.0 || eps >= 0.5) throw std::invalid_argument("eps must lie in (0, 0.5)");
  if (hidden < 1) throw std::invalid_argument("hidden must be >= 1");
}

GnnModel make_model(uint64_t seed, int hidden, bool use_edge_embedding, int var_in, int con_in) {
  if (hidden < 1 || var_in < 1 || con_in < 1) throw std::invalid_argument("bad model dims");
  GnnModel m;
  m.var_in = var_in;
  m.con_in = con_in;
  m.hidden = hidden;
  m.use_edge_embedding = use_edge_embedding;
  m.seed = seed;
  SplitMix64 rng(seed);
  m.embed_var = make_linear(rng, hidden, var_in);
  m.ln_var_gamma = Eigen::MatrixXd::Ones(hidden, 1);
  m.ln_var_beta = Eigen::MatrixXd::Zero(hidden, 1);
  m.embed_con = make_linear(rng, hidden, con_in);
  m.ln_con_gamma = Eigen::MatrixXd::Ones(hidden, 1);
  m.ln_con_beta = Eigen::MatrixXd::Zero(hidden, 1);
  m.embed_edge = make_linear(rng, hidden, 1);
  for (int k = 0; k < 2; ++k) {
    m.conv_c[k] = Mlp2{make_linear(rng, hidden, 2 * hidden), make_linear(rng, hidden, hidden)};
    m.conv_v[k] = Mlp2{make_linear(rng, hidden, 2 * hidden), make_linear(rng, hidden, hidden)};
  }
  m.head1 = make_linear(rng, hidden, hidden);
  m.head2 = make_linear(rng, 1, hidden);
  return m;
}

GnnModel zeros_like(const GnnModel& model) {
  GnnModel z = model;
  for_each_param(z, [](const std::string&, Eigen::MatrixXd& t) { t.setZero(); });
  return z;
}

void for_each_param(GnnModel& m,
                    const std::function<void(const std::string&, Eigen::MatrixXd&)>& fn) {
  fn("embed_var.W", m.embed_var.W);
  fn("embed_var.b", m.embed_var.b);
  fn("ln_var.gamma", m.ln_var_gamma);
  fn("ln_var.beta", m.ln_var_beta);
  fn("embed_con.W", m.embed_con.W);
  fn("embed_con.b", m.embed_con.b);
  fn("ln_con.gamma", m.ln_con_gamma);
  fn("ln_con.beta", m.ln_con_beta);
  fn("embed_edge.W", m.embed_edge.W);
  fn("embed_edge.b", m.embed_edge.b);
  for (int k = 0; k < 2; ++k) {
    const std::string kc = "conv_c" + std::to_string(k);
    fn(kc + ".l1.W", m.conv_c[k].l1.W);
    fn(kc + ".l1.b", m.conv_c[k].l1.b);
    fn(kc + ".l2.W", m.conv_c[k].l2.W);
    fn(kc + ".l2.b", m.conv_c[k].l2.b);
    const std::string kv = "conv_v" + std::to_string(k);
    fn(kv + ".l1.W", m.conv_v[k].l1.W);
    fn(kv + ".l1.b", m.conv_v[k].l1.b);
    fn(kv + ".l2.W", m.conv_v[k].l2.W);
    fn(kv + ".l2.b", m.conv_v[k].l2.b);
  }
  fn("head1.W", m.head1.W);
  fn("head1.b", m.head1.b);
  fn("head2.W", m.head2.W);
  fn("head2.b", m.head2.b);
}

void for_each_param(const GnnModel& m,
                    const std::function<void(const std::string&, const Eigen::MatrixXd&)>& fn) {
  for_each_param(const_cast<GnnModel&>(m),
                 [&fn](const std::string& name, Eigen::MatrixXd& t) { fn(name, t); });
}

std::vector<double> forward(const GnnModel& model, const BipartiteGraph& graph) {
  Tape t;
  run_forward(model, graph, t);
  return std::vector<double>(t.prob.data(), t.prob.data() + t.prob.size());
}

double bce_loss(std::span<const double> pred, std::span<const double> target, double eps) {
  if (pred.size() != target.size()) throw std::invalid_argument("pred/target length mismatch");
  double loss = 0.0;
  for (size_t d = 0; d < pred.size(); ++d) {
    const double p = target[d];
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("targets must lie in [0,1]");
    const double ph = std::clamp(pred[d], eps, 1.0 - eps);
    loss -= p * std::log(ph) + (1.0 - p) * std::log(1.0 - ph);
  }
  return loss;
}

double entropy_lower_bound(std::span<const double> target) {
  double h = 0.0;
  for (double p : target) {
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  }
  return h;
}

double backward(const GnnModel& model, const BipartiteGraph& g, std::span<const double> target,
                GnnModel& grad, double scale, double eps) {
  if (static_cast<int>(target.size()) != g.q) {
    throw std::invalid_argument("target length must equal q");
  }
  Tape t;
  run_forward(model, g, t);
  const std::vector<double> pred(t.prob.data(), t.prob.data() + t.prob.size());
  const double loss = bce_loss(pred, target, eps);

  const int H = model.hidden;
  const int E = static_cast<int>(g.edges.size());

  // Fused sigmoid + cross entropy. The clamp above only guards the reported
  // value; its gradient is the usual sigmoid(z) - p.
  Eigen::VectorXd dz(g.q);
  for (int d = 0; d < g.q; ++d) dz[d] = scale * (t.prob[d] - target[d]);

  // Head.
  grad.head2.W.row(0) += (dz.transpose() * t.h1h);
  grad.head2.b(0, 0) += dz.sum();
  const Eigen::MatrixXd dh1h = dz * model.head2.W;  // q x H
  const Eigen::MatrixXd dah = relu_backward(dh1h, t.ah);
  grad.head1.W.noalias() += dah.transpose() * t.hv[1].topRows(g.q);
  grad.head1.b.col(0) += dah.colwise().sum().transpose();

  Eigen::MatrixXd dprev_v = Eigen::MatrixXd::Zero(g.n, H);
  dprev_v.topRows(g.q) = dah * model.head1.W;
  Eigen::MatrixXd dprev_c = Eigen::MatrixXd::Zero(g.m, H);
  Eigen::MatrixXd dee = Eigen::MatrixXd::Zero(t.ee.rows(), H);

  for (int k = 1; k >= 0; --k) {
    // Variable update backward: hv[k] = MLP_v([prev_v, sv]).
    const Eigen::MatrixXd dxv = mlp2_backward(dprev_v, model.conv_v[k], t.tv[k], grad.conv_v[k]);
    Eigen::MatrixXd dprev_v_next = dxv.leftCols(H);
    const Eigen::MatrixXd dsv = dxv.rightCols(H);
    // sv[j] = sum over edges (i,j) of hc[k][i] (+ ee).
    Eigen::MatrixXd dhc_k = dprev_c;  // contribution from the layer above
    for (int e = 0; e < E; ++e) {
      dhc_k.row(g.edges[e].row) += dsv.row(g.edges[e].col);
      if (model.use_edge_embedding) dee.row(e) += dsv.row(g.edges[e].col);
    }
    // Constraint update backward: hc[k] = MLP_c([prev_c, sc]).
    const Eigen::MatrixXd dxc = mlp2_backward(dhc_k, model.conv_c[k], t.tc[k], grad.conv_c[k]);
    dprev_c = dxc.leftCols(H);
    const Eigen::MatrixXd dsc = dxc.rightCols(H);
    for (int e = 0; e < E; ++e) {
      dprev_v_next.row(g.edges[e].col) += dsc.row(g.edges[e].row);
      if (model.use_edge_embedding) dee.row(e) += dsc.row(g.edges[e].row);
    }
    dprev_v = std::move(dprev_v_next);
  }

  // Embeddings.
  const Eigen::MatrixXd dhv_pre = layer_norm_backward(dprev_v, t.ln_v, model.ln_var_gamma,
                                                      grad.ln_var_gamma, grad.ln_var_beta);
  grad.embed_var.W.noalias() += dhv_pre.transpose() * g.var_feats;
  grad.embed_var.b.col(0) += dhv_pre.colwise().sum().transpose();
  const Eigen::MatrixXd dhc_pre = layer_norm_backward(dprev_c, t.ln_c, model.ln_con_gamma,
                                                      grad.ln_con_gamma, grad.ln_con_beta);
  grad.embed_con.W.noalias() += dhc_pre.transpose() * g.con_feats;
  grad.embed_con.b.col(0) += dhc_pre.colwise().sum().transpose();
  if (model.use_edge_embedding) {
    for (int e = 0; e < E; ++e) {
      grad.embed_edge.W.col(0) += g.edges[e].coeff * dee.row(e).transpose();
      grad.embed_edge.b.col(0) += dee.row(e).transpose();
    }
  }
  return loss;
}

double dataset_loss(const GnnModel& model, const std::vector<TrainSample>& samples, double eps) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const TrainSample& s : samples) {
    total += bce_loss(forward(model, s.graph), s.target, eps);
  }
  return total / static_cast<double>(samples.size());
}

GnnModel train_gnn(const std::vector<TrainSample>& train_set,
                   const std::vector<TrainSample>& valid_set, const TrainConfig& cfg,
                   TrainHistory* history) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("training set is empty");

  GnnModel model = make_model(cfg.seed, cfg.hidden, cfg.use_edge_embedding);
  GnnModel grad = zeros_like(model);
  GnnModel adam_m = zeros_like(model);
  GnnModel adam_v = zeros_like(model);

  // Collect tensor pointers once so the four models iterate in lockstep.
  auto collect = [](GnnModel& m) {
    std::vector<Eigen::MatrixXd*> out;
    for_each_param(m, [&out](const std::string&, Eigen::MatrixXd& t) { out.push_back(&t); });
    return out;
  };
  const auto p_model = collect(model);
  const auto p_grad = collect(grad);
  const auto p_m = collect(adam_m);
  const auto p_v = collect(adam_v);

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  int64_t step = 0;

  SplitMix64 rng(cfg.seed ^ 0x7261696e676e6eULL);  // decoupled from the init stream
  std::vector<size_t> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  GnnModel best = model;
  double best_metric = kInf;
  int best_epoch = -1;
  TrainHistory local;
  TrainHistory& hist = history ? *history : local;
  hist.train_loss.clear();
  hist.valid_loss.clear();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates shuffle.
    for (size_t i = order.size(); i > 1; --i) {
      const size_t j = rng.bounded(i);
      std::swap(order[i - 1], order[j]);
    }
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto* t : p_grad) t->setZero();
      for (size_t i = start; i < end; ++i) {
        const TrainSample& s = train_set[order[i]];
        backward(model, s.graph, s.target, grad, scale, cfg.eps);
      }
      if (cfg.clip_norm > 0.0) {
        double sq = 0.0;
        for (auto* t : p_grad) sq += t->squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > cfg.clip_norm) {
          const double f = cfg.clip_norm / norm;
          for (auto* t : p_grad) *t *= f;
        }
      }
      ++step;
      const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (size_t i = 0; i < p_model.size(); ++i) {
        Eigen::MatrixXd& g = *p_grad[i];
        Eigen::MatrixXd& m1 = *p_m[i];
        Eigen::MatrixXd& m2 = *p_v[i];
        m1 = kBeta1 * m1 + (1.0 - kBeta1) * g;
        m2 = kBeta2 * m2 + (1.0 - kBeta2) * g.cwiseProduct(g);
        p_model[i]->array() -=
            cfg.lr * (m1.array() / bc1) / ((m2.array() / bc2).sqrt() + kAdamEps);
      }
    }

    const double train_loss = dataset_loss(model, train_set, cfg.eps);
    hist.train_loss.push_back(train_loss);
    double metric = train_loss;
    if (!valid_set.empty()) {
      const double valid_loss = dataset_loss(model, valid_set, cfg.eps);
      hist.valid_loss.push_back(valid_loss);
      metric = valid_loss;
    }
    if (metric < best_metric) {
      best_metric = metric;
      best = model;
      best_epoch = epoch;
    }
  }
  if (best_epoch < 0) best = model;  // zero epochs: return the initialization
  hist.best_epoch = best_epoch;
  return best;
}

nlohmann::json model_to_json(const GnnModel& model) {
  nlohmann::json j;
  j["format"] = "gnn-checkpoint-v1";
  j["dims"] = {{"var_in", model.var_in}, {"con_in", model.con_in}, {"hidden", model.hidden}};
  j["seed"] = model.seed;
  j["use_edge_embedding"] = model.use_edge_embedding;
  nlohmann::json params;
  for_each_param(model, [&params](const std::string& name, const Eigen::MatrixXd& t) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) data.push_back(t(r, c));
    }
    params[name] = {{"rows", t.rows()}, {"cols", t.cols()}, {"data", std::move(data)}};
  });
  j["params"] = std::move(params);
  return j;
}

GnnModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "gnn-checkpoint-v1") {
    throw std::invalid_argument("not a gnn checkpoint");
  }
  const auto& dims = j.at("dims");
  GnnModel model = make_model(j.at("seed").get<uint64_t>(), dims.at("hidden").get<int>(),
                              j.value("use_edge_embedding", false), dims.at("var_in").get<int>(),
                              dims.at("con_in").get<int>());
  const auto& params = j.at("params");
  for_each_param(model, [&params](const std::string& name, Eigen::MatrixXd& t) {
    const auto& p = params.at(name);
    const Eigen::Index rows = p.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = p.at("cols").get<Eigen::Index>();
    if (rows != t.rows() || cols != t.cols()) {
      throw std::invalid_argument("checkpoint tensor " + name + " has the wrong shape");
    }
    const auto& data = p.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw std::invalid_argument("checkpoint tensor " + name + " has the wrong size");
    }
    Eigen::Index idx = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) t(r, c) = data.at(idx++).get<double>();
    }
  });
  return model;
}

std::string history_to_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << "epoch,train_loss,valid_loss\n";
  out.precision(17);
  for (size_t e = 0; e < history.train_loss.size(); ++e) {
    out << e << "," << history.train_loss[e] << ",";
    if (e < history.valid_loss.size()) out << history.valid_loss[e];
    out << "\n";
  }
  return out.str();
}

}  // namespace pns
