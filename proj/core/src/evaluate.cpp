#include "somnoscat/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace somnoscat {

std::vector<double> expand(std::span<const double> window_probs) {
  std::vector<double> out;
  out.reserve(window_probs.size() * 1000);
  for (double p : window_probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("probability out of [0,1]");
    out.insert(out.end(), 1000, p);
  }
  return out;
}

namespace {

struct Masked {
  std::vector<double> scores;
  std::vector<bool> positive;
  std::size_t n_pos = 0, n_neg = 0, n_masked = 0;
};

Masked mask_non_target(std::span<const double> scores,
                       std::span<const std::int8_t> labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("scores/labels length mismatch");
  Masked m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == -1) {
      ++m.n_masked;
      continue;
    }
    m.scores.push_back(scores[i]);
    m.positive.push_back(labels[i] == 1);
    labels[i] == 1 ? ++m.n_pos : ++m.n_neg;
  }
  if (m.n_pos == 0 || m.n_neg == 0)
    throw std::invalid_argument("metric undefined: need both classes present");
  return m;
}

/// Sorted by descending score; groups of tied scores handled as one threshold.
std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return idx;
}

}  // namespace

double auprc(std::span<const double> scores, std::span<const std::int8_t> labels) {
  Masked m = mask_non_target(scores, labels);
  auto idx = descending_order(m.scores);

  double ap = 0;
  std::size_t tp = 0, fp = 0;
  double prev_recall = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && m.scores[idx[j]] == m.scores[idx[i]]) {
      m.positive[idx[j]] ? ++tp : ++fp;
      ++j;
    }
    double recall = static_cast<double>(tp) / static_cast<double>(m.n_pos);
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double auroc(std::span<const double> scores, std::span<const std::int8_t> labels) {
  Masked m = mask_non_target(scores, labels);
  auto idx = descending_order(m.scores);

  // Mann-Whitney: sum over tied-score groups, half credit inside a group.
  double u = 0;
  std::size_t neg_seen = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    std::size_t group_pos = 0, group_neg = 0;
    while (j < idx.size() && m.scores[idx[j]] == m.scores[idx[i]]) {
      m.positive[idx[j]] ? ++group_pos : ++group_neg;
      ++j;
    }
    // positives in this group rank above all lower-scored negatives and tie
    // with the group's negatives
    u += static_cast<double>(group_pos) *
         (static_cast<double>(m.n_neg - neg_seen - group_neg) +
          0.5 * static_cast<double>(group_neg));
    neg_seen += group_neg;
    i = j;
  }
  return u / (static_cast<double>(m.n_pos) * static_cast<double>(m.n_neg));
}

EvalReport evaluate(std::span<const double> scores,
                    std::span<const std::int8_t> labels) {
  Masked m = mask_non_target(scores, labels);
  EvalReport report;
  report.auprc = auprc(scores, labels);
  report.auroc = auroc(scores, labels);
  report.n_pos = m.n_pos;
  report.n_neg = m.n_neg;
  report.n_masked = m.n_masked;
  return report;
}

std::vector<int> assign_folds(std::size_t n_records, int k, std::uint64_t seed) {
  if (k < 2 || n_records < static_cast<std::size_t>(k))
    throw std::invalid_argument("fewer records than folds");
  std::vector<std::size_t> order(n_records);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> folds(n_records, 0);
  for (std::size_t i = 0; i < n_records; ++i)
    folds[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return folds;
}

CvReport cross_validate(const std::vector<CvRecord>& dataset, int k,
                        const NetworkConfig& net_cfg,
                        const TrainConfig& train_cfg) {
  std::vector<int> folds = assign_folds(dataset.size(), k, train_cfg.seed);

  CvReport report;
  for (int fold = 0; fold < k; ++fold) {
    std::vector<TrainSequence> train_set;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (folds[i] != fold) train_set.push_back(dataset[i].sequence);

    TrainResult tr = train(train_set, net_cfg, train_cfg);

    std::vector<double> scores;
    std::vector<std::int8_t> labels;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (folds[i] != fold) continue;
      Eigen::VectorXd probs = predict(tr.model, dataset[i].features);
      std::vector<double> sample_probs =
          expand(std::span<const double>(probs.data(),
                                         static_cast<std::size_t>(probs.size())));
      // annotation tail beyond the last full window is not scored
      std::size_t n = std::min(sample_probs.size(),
                               dataset[i].sample_labels.size());
      scores.insert(scores.end(), sample_probs.begin(),
                    sample_probs.begin() + static_cast<std::ptrdiff_t>(n));
      labels.insert(labels.end(), dataset[i].sample_labels.begin(),
                    dataset[i].sample_labels.begin() + static_cast<std::ptrdiff_t>(n));
    }
    CvFoldRow row;
    row.fold = fold + 1;
    row.auprc = auprc(scores, labels);
    row.auroc = auroc(scores, labels);
    report.folds.push_back(row);
    report.models.push_back(std::move(tr.model));
  }

  auto mean_std = [](const std::vector<CvFoldRow>& rows, auto member) {
    double mean = 0;
    for (const auto& r : rows) mean += r.*member;
    mean /= static_cast<double>(rows.size());
    double var = 0;
    for (const auto& r : rows) var += (r.*member - mean) * (r.*member - mean);
    var /= static_cast<double>(rows.size());
    return std::pair{mean, std::sqrt(var)};
  };
  std::tie(report.mean_auprc, report.std_auprc) =
      mean_std(report.folds, &CvFoldRow::auprc);
  std::tie(report.mean_auroc, report.std_auroc) =
      mean_std(report.folds, &CvFoldRow::auroc);
  return report;
}

}  // namespace somnoscat
