#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace somnoscat {

struct NetworkConfig {
  int layers = 3;
  int hidden = 200;           // per direction
  double leaky_slope = 0.5;
  bool bidirectional = true;
  int input_dim = 465;

  bool operator==(const NetworkConfig&) const = default;
};

struct TrainConfig {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int epochs = 30;
  int lr_decay_every = 10;    // epochs between decays
  double lr_decay = 0.7;
  double clip_norm = 1.0;
  int batch_subjects = 20;
  double weight_target = 0.9;
  double weight_nonarousal = 0.1;
  std::uint64_t seed = 1;

  bool operator==(const TrainConfig&) const = default;
};

/// One direction of one layer; gate rows packed [i; f; g; o], each H rows.
struct GateParams {
  Eigen::MatrixXd w;  // 4H x input
  Eigen::MatrixXd u;  // 4H x H
  Eigen::VectorXd b;  // 4H
};

struct LayerParams {
  GateParams fwd, bwd;  // bwd unused when unidirectional
};

struct ParamSet {
  std::vector<LayerParams> layers;
  Eigen::MatrixXd head_w;  // 2 x (2H or H)
  Eigen::VectorXd head_b;  // 2
};

struct BilstmModel {
  NetworkConfig cfg;
  ParamSet params;
  int epochs_trained = 0;
  double final_loss = 0.0;
};

/// Flat views over every parameter tensor, in a fixed deterministic order.
std::vector<std::pair<double*, std::size_t>> param_blocks(ParamSet& p,
                                                          bool bidirectional);

ParamSet zeros_like(const ParamSet& p);

/// Uniform [-1/sqrt(H), 1/sqrt(H)] init, forget-gate bias +1, seeded.
BilstmModel init_model(const NetworkConfig& cfg, std::uint64_t seed);

/// Single cell update (exposed for the unit oracle).
std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_step(
    const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
    const Eigen::VectorXd& c_prev, const GateParams& params);

/// Per-step class probabilities; X is M x D (one row per window).
Eigen::MatrixXd forward(const BilstmModel& model, const Eigen::MatrixXd& x);

/// Weighted cross-entropy, normalized by the summed step weights.
/// Labels must be 0/1; -1 entries are a contract violation.
double sequence_loss(const Eigen::MatrixXd& probs, const std::vector<int>& labels,
                     double weight_target, double weight_nonarousal);

struct BackwardResult {
  ParamSet grads;
  double loss = 0.0;
};

/// Exact BPTT gradients of sequence_loss over every parameter.
BackwardResult backward(const BilstmModel& model, const Eigen::MatrixXd& x,
                        const std::vector<int>& labels, double weight_target,
                        double weight_nonarousal);

struct AdamState {
  ParamSet m, v;
  long step = 0;
};

AdamState init_adam(const ParamSet& params);

/// Global-norm clip across every block, then bias-corrected Adam.
void adam_step(ParamSet& params, ParamSet& grads, AdamState& state, double lr,
               double beta1, double beta2, double clip_norm,
               bool bidirectional, double eps = 1e-8);

struct TrainSequence {
  Eigen::MatrixXd features;  // M x D
  std::vector<int> labels;   // 0/1 per window, non-target windows removed
};

struct TrainResult {
  BilstmModel model;
  std::vector<double> loss_trace;  // mean per-sequence loss per epoch
};

TrainResult train(const std::vector<TrainSequence>& dataset,
                  const NetworkConfig& net_cfg, const TrainConfig& train_cfg);

/// Per-window probability of the target class.
Eigen::VectorXd predict(const BilstmModel& model, const Eigen::MatrixXd& x);

Eigen::VectorXd ensemble_predict(const std::vector<BilstmModel>& models,
                                 const Eigen::MatrixXd& x);

/// First-layer input-weight saliency: per feature, the summed absolute
/// weights over all gates and both directions.
Eigen::VectorXd feature_score(const BilstmModel& model);

/// Top-k indices by descending score; ties broken by lower index.
std::vector<int> select_top_k(const Eigen::VectorXd& scores, int k);

void save_model(const BilstmModel& model, const std::filesystem::path& file);
BilstmModel load_model(const std::filesystem::path& file);

}  // namespace somnoscat
