#include "somnoscat/bilstm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace somnoscat {

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) {
  return 1.0 / (1.0 + (-z).exp());
}

int layer_input_dim(const NetworkConfig& cfg, int layer) {
  if (layer == 0) return cfg.input_dim;
  return cfg.bidirectional ? 2 * cfg.hidden : cfg.hidden;
}

int head_input_dim(const NetworkConfig& cfg) {
  return cfg.bidirectional ? 2 * cfg.hidden : cfg.hidden;
}

/// Activations of one direction of one layer across all steps.
struct DirCache {
  Eigen::MatrixXd i, f, g, o, c, tanh_c, h;  // H x M each
};

/// Runs one direction. `order` lists time indices in processing order.
DirCache run_direction(const Eigen::MatrixXd& x_in, const GateParams& p,
                       const std::vector<int>& order) {
  const int hidden = static_cast<int>(p.u.cols());
  const int m = static_cast<int>(x_in.cols());
  DirCache cache;
  for (auto* mat : {&cache.i, &cache.f, &cache.g, &cache.o, &cache.c,
                    &cache.tanh_c, &cache.h})
    mat->resize(hidden, m);

  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(hidden);
  for (int t : order) {
    Eigen::VectorXd z = p.w * x_in.col(t) + p.u * h_prev + p.b;
    Eigen::ArrayXd zi = z.segment(0, hidden).array();
    Eigen::ArrayXd zf = z.segment(hidden, hidden).array();
    Eigen::ArrayXd zg = z.segment(2 * hidden, hidden).array();
    Eigen::ArrayXd zo = z.segment(3 * hidden, hidden).array();

    cache.i.col(t) = sigmoid(zi);
    cache.f.col(t) = sigmoid(zf);
    cache.g.col(t) = zg.tanh();
    cache.o.col(t) = sigmoid(zo);
    cache.c.col(t) = cache.f.col(t).cwiseProduct(c_prev) +
                     cache.i.col(t).cwiseProduct(cache.g.col(t));
    cache.tanh_c.col(t) = cache.c.col(t).array().tanh();
    cache.h.col(t) = cache.o.col(t).cwiseProduct(cache.tanh_c.col(t));

    h_prev = cache.h.col(t);
    c_prev = cache.c.col(t);
  }
  return cache;
}

struct ForwardCache {
  std::vector<Eigen::MatrixXd> layer_inputs;  // per layer, D_l x M
  std::vector<DirCache> fwd, bwd;
  Eigen::MatrixXd head_in;   // (2H or H) x M, pre-leaky
  Eigen::MatrixXd leaky;     // same shape, post-leaky
  Eigen::MatrixXd probs;     // 2 x M
};

ForwardCache run_forward(const BilstmModel& model, const Eigen::MatrixXd& x_rows) {
  const auto& cfg = model.cfg;
  if (static_cast<int>(x_rows.cols()) != cfg.input_dim)
    throw std::invalid_argument("feature dimension mismatch");
  const int m = static_cast<int>(x_rows.rows());
  if (m == 0) throw std::invalid_argument("empty sequence");

  std::vector<int> fwd_order(static_cast<std::size_t>(m));
  std::iota(fwd_order.begin(), fwd_order.end(), 0);
  std::vector<int> bwd_order(fwd_order.rbegin(), fwd_order.rend());

  ForwardCache cache;
  Eigen::MatrixXd x_in = x_rows.transpose();  // D x M
  for (int l = 0; l < cfg.layers; ++l) {
    cache.layer_inputs.push_back(x_in);
    const auto& lp = model.params.layers[static_cast<std::size_t>(l)];
    cache.fwd.push_back(run_direction(x_in, lp.fwd, fwd_order));
    if (cfg.bidirectional) {
      cache.bwd.push_back(run_direction(x_in, lp.bwd, bwd_order));
      Eigen::MatrixXd concat(2 * cfg.hidden, m);
      concat.topRows(cfg.hidden) = cache.fwd.back().h;
      concat.bottomRows(cfg.hidden) = cache.bwd.back().h;
      x_in = std::move(concat);
    } else {
      x_in = cache.fwd.back().h;
    }
  }

  cache.head_in = x_in;
  cache.leaky = x_in.unaryExpr([&](double v) {
    return v > 0.0 ? v : cfg.leaky_slope * v;
  });

  Eigen::MatrixXd logits =
      (model.params.head_w * cache.leaky).colwise() + model.params.head_b;
  cache.probs.resize(2, m);
  for (int t = 0; t < m; ++t) {
    double mx = logits.col(t).maxCoeff();
    Eigen::Vector2d e = (logits.col(t).array() - mx).exp();
    cache.probs.col(t) = e / e.sum();
  }
  return cache;
}

void check_labels(const std::vector<int>& labels, int m) {
  if (static_cast<int>(labels.size()) != m)
    throw std::invalid_argument("label count mismatch");
  for (int y : labels) {
    if (y == -1)
      throw std::invalid_argument("non-target label -1 must be removed upstream");
    if (y != 0 && y != 1) throw std::invalid_argument("label out of {0,1}");
  }
}

double weighted_loss(const Eigen::MatrixXd& probs, const std::vector<int>& labels,
                     double w1, double w0) {
  double num = 0, den = 0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    double w = labels[t] == 1 ? w1 : w0;
    double p = std::max(probs(labels[t], static_cast<int>(t)), 1e-12);
    num -= w * std::log(p);
    den += w;
  }
  return den > 0 ? num / den : 0.0;
}

/// BPTT through one direction; returns gradient w.r.t. the layer input.
Eigen::MatrixXd backprop_direction(const Eigen::MatrixXd& x_in,
                                   const GateParams& p, const DirCache& cache,
                                   const Eigen::MatrixXd& dh_out,
                                   const std::vector<int>& order,
                                   GateParams& grads) {
  const int hidden = static_cast<int>(p.u.cols());
  const int m = static_cast<int>(x_in.cols());
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(x_in.rows(), m);

  Eigen::VectorXd dh_carry = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd dc_carry = Eigen::VectorXd::Zero(hidden);

  for (int s = m - 1; s >= 0; --s) {
    int t = order[static_cast<std::size_t>(s)];
    int t_prev = s > 0 ? order[static_cast<std::size_t>(s - 1)] : -1;

    Eigen::ArrayXd i = cache.i.col(t).array();
    Eigen::ArrayXd f = cache.f.col(t).array();
    Eigen::ArrayXd g = cache.g.col(t).array();
    Eigen::ArrayXd o = cache.o.col(t).array();
    Eigen::ArrayXd tc = cache.tanh_c.col(t).array();

    Eigen::ArrayXd dh = dh_out.col(t).array() + dh_carry.array();
    Eigen::ArrayXd dc = dc_carry.array() + dh * o * (1.0 - tc * tc);

    Eigen::ArrayXd c_prev = t_prev >= 0
                                ? cache.c.col(t_prev).array()
                                : Eigen::ArrayXd::Zero(hidden).eval();
    Eigen::ArrayXd h_prev_arr = t_prev >= 0
                                    ? cache.h.col(t_prev).array()
                                    : Eigen::ArrayXd::Zero(hidden).eval();

    Eigen::VectorXd dz(4 * hidden);
    dz.segment(0, hidden) = (dc * g * i * (1.0 - i)).matrix();           // i
    dz.segment(hidden, hidden) = (dc * c_prev * f * (1.0 - f)).matrix(); // f
    dz.segment(2 * hidden, hidden) = (dc * i * (1.0 - g * g)).matrix();  // g
    dz.segment(3 * hidden, hidden) = (dh * tc * o * (1.0 - o)).matrix(); // o

    grads.w.noalias() += dz * x_in.col(t).transpose();
    grads.u.noalias() += dz * h_prev_arr.matrix().transpose();
    grads.b += dz;

    dx.col(t).noalias() += p.w.transpose() * dz;
    dh_carry.noalias() = p.u.transpose() * dz;
    dc_carry = (dc * f).matrix();
  }
  return dx;
}

void for_each_block(ParamSet& p, bool bidirectional,
                    const std::function<void(Eigen::Map<Eigen::VectorXd>)>& fn) {
  for (auto& layer : p.layers) {
    for (GateParams* gp : {&layer.fwd, &layer.bwd}) {
      if (gp == &layer.bwd && !bidirectional) continue;
      fn({gp->w.data(), gp->w.size()});
      fn({gp->u.data(), gp->u.size()});
      fn({gp->b.data(), gp->b.size()});
    }
  }
  fn({p.head_w.data(), p.head_w.size()});
  fn({p.head_b.data(), p.head_b.size()});
}

}  // namespace

std::vector<std::pair<double*, std::size_t>> param_blocks(ParamSet& p,
                                                          bool bidirectional) {
  std::vector<std::pair<double*, std::size_t>> blocks;
  for_each_block(p, bidirectional, [&](Eigen::Map<Eigen::VectorXd> v) {
    blocks.emplace_back(v.data(), static_cast<std::size_t>(v.size()));
  });
  return blocks;
}

ParamSet zeros_like(const ParamSet& p) {
  ParamSet z;
  for (const auto& layer : p.layers) {
    LayerParams lz;
    for (auto [src, dst] : {std::pair{&layer.fwd, &lz.fwd}, {&layer.bwd, &lz.bwd}}) {
      dst->w = Eigen::MatrixXd::Zero(src->w.rows(), src->w.cols());
      dst->u = Eigen::MatrixXd::Zero(src->u.rows(), src->u.cols());
      dst->b = Eigen::VectorXd::Zero(src->b.size());
    }
    z.layers.push_back(std::move(lz));
  }
  z.head_w = Eigen::MatrixXd::Zero(p.head_w.rows(), p.head_w.cols());
  z.head_b = Eigen::VectorXd::Zero(p.head_b.size());
  return z;
}

BilstmModel init_model(const NetworkConfig& cfg, std::uint64_t seed) {
  if (cfg.layers < 1 || cfg.hidden < 1 || cfg.input_dim < 1 ||
      !(cfg.leaky_slope > 0.0 && cfg.leaky_slope < 1.0))
    throw std::invalid_argument("invalid network config");

  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
  std::uniform_real_distribution<double> dist(-bound, bound);
  auto fill = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  };

  BilstmModel model;
  model.cfg = cfg;
  for (int l = 0; l < cfg.layers; ++l) {
    int din = layer_input_dim(cfg, l);
    LayerParams lp;
    for (GateParams* gp : {&lp.fwd, &lp.bwd}) {
      gp->w.resize(4 * cfg.hidden, din);
      gp->u.resize(4 * cfg.hidden, cfg.hidden);
      gp->b = Eigen::VectorXd::Zero(4 * cfg.hidden);
      fill(gp->w);
      fill(gp->u);
      gp->b.segment(cfg.hidden, cfg.hidden).setOnes();  // forget-gate bias
    }
    model.params.layers.push_back(std::move(lp));
  }
  model.params.head_w.resize(2, head_input_dim(cfg));
  fill(model.params.head_w);
  model.params.head_b = Eigen::VectorXd::Zero(2);
  return model;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_step(
    const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
    const Eigen::VectorXd& c_prev, const GateParams& params) {
  const int hidden = static_cast<int>(params.u.cols());
  if (params.w.cols() != x.size() || h_prev.size() != hidden ||
      c_prev.size() != hidden)
    throw std::invalid_argument("lstm_step shape mismatch");
  Eigen::VectorXd z = params.w * x + params.u * h_prev + params.b;
  Eigen::ArrayXd i = sigmoid(z.segment(0, hidden).array());
  Eigen::ArrayXd f = sigmoid(z.segment(hidden, hidden).array());
  Eigen::ArrayXd g = z.segment(2 * hidden, hidden).array().tanh();
  Eigen::ArrayXd o = sigmoid(z.segment(3 * hidden, hidden).array());
  Eigen::VectorXd c = (f * c_prev.array() + i * g).matrix();
  Eigen::VectorXd h = (o * c.array().tanh()).matrix();
  return {h, c};
}

Eigen::MatrixXd forward(const BilstmModel& model, const Eigen::MatrixXd& x) {
  return run_forward(model, x).probs.transpose();
}

double sequence_loss(const Eigen::MatrixXd& probs, const std::vector<int>& labels,
                     double weight_target, double weight_nonarousal) {
  check_labels(labels, static_cast<int>(probs.rows()));
  return weighted_loss(probs.transpose(), labels, weight_target, weight_nonarousal);
}

BackwardResult backward(const BilstmModel& model, const Eigen::MatrixXd& x,
                        const std::vector<int>& labels, double weight_target,
                        double weight_nonarousal) {
  const auto& cfg = model.cfg;
  const int m = static_cast<int>(x.rows());
  check_labels(labels, m);

  ForwardCache cache = run_forward(model, x);

  BackwardResult result;
  result.grads = zeros_like(model.params);
  result.loss =
      weighted_loss(cache.probs, labels, weight_target, weight_nonarousal);

  double w_sum = 0;
  for (int y : labels) w_sum += y == 1 ? weight_target : weight_nonarousal;
  if (w_sum <= 0) return result;

  // softmax + weighted CE
  Eigen::MatrixXd dlogits = cache.probs;  // 2 x M
  for (int t = 0; t < m; ++t) {
    double w = labels[static_cast<std::size_t>(t)] == 1 ? weight_target
                                                        : weight_nonarousal;
    dlogits(labels[static_cast<std::size_t>(t)], t) -= 1.0;
    dlogits.col(t) *= w / w_sum;
  }

  result.grads.head_w.noalias() = dlogits * cache.leaky.transpose();
  result.grads.head_b = dlogits.rowwise().sum();

  Eigen::MatrixXd dleaky = model.params.head_w.transpose() * dlogits;
  Eigen::MatrixXd dhead_in = dleaky.binaryExpr(
      cache.head_in, [&](double dg, double u) {
        return u > 0.0 ? dg : cfg.leaky_slope * dg;
      });

  std::vector<int> fwd_order(static_cast<std::size_t>(m));
  std::iota(fwd_order.begin(), fwd_order.end(), 0);
  std::vector<int> bwd_order(fwd_order.rbegin(), fwd_order.rend());

  Eigen::MatrixXd dout = dhead_in;  // gradient w.r.t. top layer output
  for (int l = cfg.layers - 1; l >= 0; --l) {
    const auto& lp = model.params.layers[static_cast<std::size_t>(l)];
    auto& gl = result.grads.layers[static_cast<std::size_t>(l)];
    const auto& x_in = cache.layer_inputs[static_cast<std::size_t>(l)];

    Eigen::MatrixXd dx;
    if (cfg.bidirectional) {
      Eigen::MatrixXd dh_f = dout.topRows(cfg.hidden);
      Eigen::MatrixXd dh_b = dout.bottomRows(cfg.hidden);
      dx = backprop_direction(x_in, lp.fwd, cache.fwd[static_cast<std::size_t>(l)],
                              dh_f, fwd_order, gl.fwd);
      dx += backprop_direction(x_in, lp.bwd, cache.bwd[static_cast<std::size_t>(l)],
                               dh_b, bwd_order, gl.bwd);
    } else {
      dx = backprop_direction(x_in, lp.fwd, cache.fwd[static_cast<std::size_t>(l)],
                              dout, fwd_order, gl.fwd);
    }
    dout = std::move(dx);
  }
  return result;
}

AdamState init_adam(const ParamSet& params) {
  AdamState s;
  s.m = zeros_like(params);
  s.v = zeros_like(params);
  return s;
}

void adam_step(ParamSet& params, ParamSet& grads, AdamState& state, double lr,
               double beta1, double beta2, double clip_norm, bool bidirectional,
               double eps) {
  auto pb = param_blocks(params, bidirectional);
  auto gb = param_blocks(grads, bidirectional);
  auto mb = param_blocks(state.m, bidirectional);
  auto vb = param_blocks(state.v, bidirectional);

  double norm_sq = 0;
  for (auto& [ptr, n] : gb)
    for (std::size_t i = 0; i < n; ++i) norm_sq += ptr[i] * ptr[i];
  double norm = std::sqrt(norm_sq);
  if (norm > clip_norm && norm > 0) {
    double s = clip_norm / norm;
    for (auto& [ptr, n] : gb)
      for (std::size_t i = 0; i < n; ++i) ptr[i] *= s;
  }

  ++state.step;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t blk = 0; blk < pb.size(); ++blk) {
    double* p = pb[blk].first;
    double* g = gb[blk].first;
    double* mm = mb[blk].first;
    double* vv = vb[blk].first;
    for (std::size_t i = 0; i < pb[blk].second; ++i) {
      mm[i] = beta1 * mm[i] + (1.0 - beta1) * g[i];
      vv[i] = beta2 * vv[i] + (1.0 - beta2) * g[i] * g[i];
      double m_hat = mm[i] / bc1;
      double v_hat = vv[i] / bc2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

TrainResult train(const std::vector<TrainSequence>& dataset,
                  const NetworkConfig& net_cfg, const TrainConfig& train_cfg) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  for (const auto& seq : dataset)
    check_labels(seq.labels, static_cast<int>(seq.features.rows()));

  // sorted by sequence length, stable so equal lengths keep input order
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dataset[a].features.rows() < dataset[b].features.rows();
  });

  TrainResult result;
  result.model = init_model(net_cfg, train_cfg.seed);
  AdamState adam = init_adam(result.model.params);

  double lr = train_cfg.lr;
  const std::size_t batch = static_cast<std::size_t>(train_cfg.batch_subjects);

  for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    double epoch_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      std::size_t end = std::min(start + batch, order.size());
      ParamSet batch_grads = zeros_like(result.model.params);
      auto acc = param_blocks(batch_grads, net_cfg.bidirectional);
      for (std::size_t bi = start; bi < end; ++bi) {
        const auto& seq = dataset[order[bi]];
        BackwardResult br =
            backward(result.model, seq.features, seq.labels,
                     train_cfg.weight_target, train_cfg.weight_nonarousal);
        epoch_loss += br.loss;
        auto src = param_blocks(br.grads, net_cfg.bidirectional);
        for (std::size_t k = 0; k < acc.size(); ++k)
          for (std::size_t i = 0; i < acc[k].second; ++i)
            acc[k].first[i] += src[k].first[i];
      }
      adam_step(result.model.params, batch_grads, adam, lr, train_cfg.beta1,
                train_cfg.beta2, train_cfg.clip_norm, net_cfg.bidirectional);
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(dataset.size()));
    if (train_cfg.lr_decay_every > 0 && epoch % train_cfg.lr_decay_every == 0 &&
        epoch < train_cfg.epochs)
      lr *= train_cfg.lr_decay;
  }

  result.model.epochs_trained = train_cfg.epochs;
  result.model.final_loss = result.loss_trace.back();
  return result;
}

Eigen::VectorXd predict(const BilstmModel& model, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd probs = forward(model, x);
  return probs.col(1);
}

Eigen::VectorXd ensemble_predict(const std::vector<BilstmModel>& models,
                                 const Eigen::MatrixXd& x) {
  if (models.empty()) throw std::invalid_argument("empty ensemble");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(x.rows());
  for (const auto& m : models) acc += predict(m, x);
  return acc / static_cast<double>(models.size());
}

Eigen::VectorXd feature_score(const BilstmModel& model) {
  const auto& first = model.params.layers.front();
  Eigen::VectorXd scores = first.fwd.w.cwiseAbs().colwise().sum();
  if (model.cfg.bidirectional)
    scores += first.bwd.w.cwiseAbs().colwise().sum();
  return scores;
}

std::vector<int> select_top_k(const Eigen::VectorXd& scores, int k) {
  if (k < 0 || k > scores.size())
    throw std::invalid_argument("k out of range");
  std::vector<int> idx(static_cast<std::size_t>(scores.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace somnoscat
