#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "somnoscat/bilstm.hpp"

namespace somnoscat {

struct EvalReport {
  double auprc = 0;
  double auroc = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t n_masked = 0;
};

/// Repeat each window probability 1000x (5 s at 200 Hz), order preserved.
std::vector<double> expand(std::span<const double> window_probs);

/// Average precision over descending unique thresholds, ties grouped.
/// Labels in {-1, 0, 1}; -1 samples are removed before scoring.
double auprc(std::span<const double> scores, std::span<const std::int8_t> labels);

/// Mann-Whitney statistic; ties count one half.
double auroc(std::span<const double> scores, std::span<const std::int8_t> labels);

EvalReport evaluate(std::span<const double> scores,
                    std::span<const std::int8_t> labels);

struct CvRecord {
  TrainSequence sequence;               // training view (non-target removed)
  Eigen::MatrixXd features;             // full window sequence, M x D
  std::vector<std::int8_t> sample_labels;  // per-sample {-1,0,1}
};

struct CvFoldRow {
  int fold = 0;
  double auprc = 0;
  double auroc = 0;
};

struct CvReport {
  std::vector<CvFoldRow> folds;
  double mean_auprc = 0, std_auprc = 0;
  double mean_auroc = 0, std_auroc = 0;
  std::vector<BilstmModel> models;  // the trained ensemble, one per fold
};

/// Record-level fold assignment: seeded shuffle then round-robin.
std::vector<int> assign_folds(std::size_t n_records, int k, std::uint64_t seed);

CvReport cross_validate(const std::vector<CvRecord>& dataset, int k,
                        const NetworkConfig& net_cfg, const TrainConfig& train_cfg);

}  // namespace somnoscat
