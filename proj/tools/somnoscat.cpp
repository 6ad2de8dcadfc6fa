// Command-line front end: synth, extract, train, predict, evaluate,
// plot-filterbank. Exit codes: 0 success, 1 usage, 2 data error,
// 3 numeric failure.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "somnoscat/config.hpp"
#include "somnoscat/evaluate.hpp"
#include "somnoscat/feature_matrix.hpp"
#include "somnoscat/preprocess.hpp"
#include "somnoscat/synthetic.hpp"

namespace fs = std::filesystem;
using namespace somnoscat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::vector<fs::path> list_record_dirs(const fs::path& data_dir) {
  std::vector<fs::path> dirs;
  if (!fs::is_directory(data_dir))
    throw ParseError("data directory not found: " + data_dir.string());
  for (const auto& e : fs::directory_iterator(data_dir))
    if (e.is_directory() && fs::exists(e.path() / "header.txt"))
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

std::vector<fs::path> list_feature_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir))
    throw ParseError("feature directory not found: " + dir.string());
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".feat")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<int> load_selection(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open selection file " + file.string());
  std::vector<int> idx;
  int v;
  while (in >> v) idx.push_back(v);
  return idx;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x,
                               const std::vector<int>& idx) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = x.col(idx[i]);
  return out;
}

/// Training view of one record: non-target windows spliced out.
TrainSequence make_train_sequence(const Eigen::MatrixXd& features,
                                  const WindowLabels& wl) {
  std::vector<int> keep;
  for (std::size_t i = 0; i < wl.labels.size(); ++i)
    if (wl.labels[i] != -1) keep.push_back(static_cast<int>(i));
  TrainSequence seq;
  seq.features.resize(static_cast<Eigen::Index>(keep.size()), features.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    seq.features.row(static_cast<Eigen::Index>(i)) = features.row(keep[i]);
    seq.labels.push_back(wl.labels[static_cast<std::size_t>(keep[i])]);
  }
  return seq;
}

struct LoadedRecordSet {
  std::vector<std::string> ids;
  std::vector<Eigen::MatrixXd> features;
  std::vector<WindowLabels> window_labels;
  std::vector<AnnotationTrack> annotations;
};

LoadedRecordSet load_training_set(const fs::path& features_dir,
                                  const fs::path& data_dir) {
  LoadedRecordSet set;
  for (const auto& f : list_feature_files(features_dir)) {
    FeatureMatrix fm = load_features(f);
    fs::path rec_dir = data_dir / fm.record_id;
    AnnotationTrack ann = load_annotations(rec_dir / "arousal.i8");
    set.ids.push_back(fm.record_id);
    set.features.push_back(fm.to_eigen());
    set.window_labels.push_back(window_labels(ann));
    set.annotations.push_back(std::move(ann));
  }
  if (set.ids.empty())
    throw ParseError("no feature files in " + features_dir.string());
  return set;
}

void write_loss_csv(const fs::path& file, const std::vector<double>& trace) {
  std::ofstream out(file, std::ios::trunc);
  out.precision(12);
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << (i + 1) << "," << trace[i] << "\n";
}

TrainResult train_with_restarts(const std::vector<TrainSequence>& dataset,
                                const NetworkConfig& net_cfg,
                                TrainConfig train_cfg, int restarts) {
  TrainResult best;
  bool have = false;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    TrainConfig tc = train_cfg;
    tc.seed = train_cfg.seed + static_cast<std::uint64_t>(r);
    TrainResult tr = train(dataset, net_cfg, tc);
    if (!have || tr.model.final_loss < best.model.final_loss) {
      best = std::move(tr);
      have = true;
    }
  }
  return best;
}

int cmd_synth(const fs::path& out_dir, int n_records, double duration,
              std::uint64_t seed) {
  fs::create_directories(out_dir);
  for (int r = 0; r < n_records; ++r) {
    std::uint64_t rec_seed = seed + static_cast<std::uint64_t>(r);
    // randomized but seed-determined arousal placement
    std::mt19937_64 rng(rec_seed * 7919ULL);
    std::vector<ArousalWindow> wins;
    double t = 5.0;
    std::uniform_real_distribution<double> gap(5.0, 15.0);
    std::uniform_real_distribution<double> len(5.0, 10.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    while (t + 12.0 < duration) {
      double l = len(rng);
      if (t + l > duration - 2.0) break;
      ArousalKind kind =
          coin(rng) < 0.75 ? ArousalKind::Target : ArousalKind::NonTarget;
      wins.push_back({t, t + l, kind});
      t += l + gap(rng);
    }
    auto [rec, ann] = generate_synthetic(rec_seed, duration, wins);
    char name[32];
    std::snprintf(name, sizeof(name), "rec%03d", r);
    rec.id = name;
    fs::path dir = out_dir / name;
    store_record(rec, dir);
    store_annotations(ann, dir / "arousal.i8");
    std::cout << "synth " << name << ": " << rec.length() << " samples, "
              << wins.size() << " arousal windows\n";
  }
  return kExitOk;
}

int cmd_extract(const PipelineConfig& cfg, const fs::path& out_dir) {
  ScatteringNet net = build_scattering_net(kSampleRate, cfg.scatter_decimate,
                                           cfg.scatter_target_dim);
  fs::create_directories(out_dir);
  auto dirs = list_record_dirs(cfg.data_dir);
  if (dirs.empty()) throw ParseError("no records in " + cfg.data_dir);
  std::size_t failed = 0;
  for (const auto& dir : dirs) {
    try {
      PsgRecord rec = load_record(dir);
      FeatureMatrix fm = extract_features(rec, cfg.feature_set, net);
      store_features(fm, out_dir / (rec.id + ".feat"));
      std::cout << "extract " << rec.id << ": " << fm.rows << " x "
                << fm.cols() << "\n";
    } catch (const std::exception& e) {
      ++failed;
      std::cerr << "skipping " << dir << ": " << e.what() << "\n";
    }
  }
  if (failed == dirs.size()) {
    std::cerr << "all records failed to extract\n";
    return kExitData;
  }
  return kExitOk;
}

int cmd_train(const PipelineConfig& cfg, const fs::path& features_dir,
              const fs::path& out_dir, int cv_folds, bool pretrain_select,
              int select_k) {
  LoadedRecordSet set = load_training_set(features_dir, cfg.data_dir);
  fs::create_directories(out_dir);

  NetworkConfig net_cfg = cfg.net;
  net_cfg.input_dim = static_cast<int>(set.features.front().cols());

  std::vector<TrainSequence> sequences;
  for (std::size_t i = 0; i < set.ids.size(); ++i)
    sequences.push_back(make_train_sequence(set.features[i], set.window_labels[i]));

  std::vector<int> selection;
  if (pretrain_select) {
    TrainResult pre = train_with_restarts(sequences, net_cfg, cfg.train,
                                          cfg.restarts);
    selection = select_top_k(feature_score(pre.model), select_k);
    std::sort(selection.begin(), selection.end());
    std::ofstream sel(out_dir / "selection.txt", std::ios::trunc);
    for (int idx : selection) sel << idx << "\n";
    for (auto& seq : sequences)
      seq.features = select_columns(seq.features, selection);
    net_cfg.input_dim = select_k;
    std::cout << "pretrain-select: kept top " << select_k << " features\n";
  }

  if (cv_folds > 1) {
    std::vector<CvRecord> dataset;
    for (std::size_t i = 0; i < set.ids.size(); ++i) {
      CvRecord r;
      r.sequence = sequences[i];
      r.features = selection.empty()
                       ? set.features[i]
                       : select_columns(set.features[i], selection);
      r.sample_labels.assign(set.annotations[i].labels.begin(),
                             set.annotations[i].labels.end());
      dataset.push_back(std::move(r));
    }
    CvReport report = cross_validate(dataset, cv_folds, net_cfg, cfg.train);

    std::ofstream csv(out_dir / "cv_report.csv", std::ios::trunc);
    csv.precision(6);
    csv << "fold,auprc,auroc\n";
    for (const auto& row : report.folds) {
      csv << row.fold << "," << row.auprc << "," << row.auroc << "\n";
      std::cout << "fold " << row.fold << "  AUPRC " << row.auprc << "  AUROC "
                << row.auroc << "\n";
    }
    csv << "mean," << report.mean_auprc << "," << report.mean_auroc << "\n";
    csv << "std," << report.std_auprc << "," << report.std_auroc << "\n";
    std::cout << "mean AUPRC " << report.mean_auprc << " (" << report.std_auprc
              << ")  AUROC " << report.mean_auroc << " (" << report.std_auroc
              << ")\n";

    std::ofstream manifest(out_dir / "ensemble.txt", std::ios::trunc);
    for (std::size_t i = 0; i < report.models.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "fold%02zu.ckpt", i + 1);
      save_model(report.models[i], out_dir / name);
      manifest << name << "\n";
    }
    return kExitOk;
  }

  TrainResult tr = train_with_restarts(sequences, net_cfg, cfg.train,
                                       cfg.restarts);
  save_model(tr.model, out_dir / "model.ckpt");
  write_loss_csv(out_dir / "loss.csv", tr.loss_trace);
  std::cout << "trained " << cfg.train.epochs << " epochs, final loss "
            << tr.model.final_loss << "\n";
  return kExitOk;
}

int cmd_predict(const fs::path& model_file, const fs::path& ensemble_file,
                const fs::path& features_dir, const fs::path& out_dir,
                const fs::path& selection_file) {
  std::vector<BilstmModel> models;
  if (!ensemble_file.empty()) {
    std::ifstream manifest(ensemble_file);
    if (!manifest)
      throw ParseError("cannot open ensemble manifest " + ensemble_file.string());
    std::string name;
    while (std::getline(manifest, name))
      if (!name.empty()) models.push_back(load_model(ensemble_file.parent_path() / name));
  } else {
    models.push_back(load_model(model_file));
  }
  if (models.empty()) throw ParseError("empty ensemble");

  std::vector<int> selection;
  if (!selection_file.empty()) selection = load_selection(selection_file);

  fs::create_directories(out_dir);
  for (const auto& f : list_feature_files(features_dir)) {
    FeatureMatrix fm = load_features(f);
    Eigen::MatrixXd x = fm.to_eigen();
    if (!selection.empty()) x = select_columns(x, selection);
    Eigen::VectorXd window_probs = ensemble_predict(models, x);
    std::vector<double> wp(window_probs.data(),
                           window_probs.data() + window_probs.size());
    PredictionTrack track;
    track.probs = expand(wp);
    for (double& p : track.probs) p = static_cast<double>(static_cast<float>(p));
    store_predictions(track, out_dir / (fm.record_id + ".pred.f32"));
    std::cout << "predict " << fm.record_id << ": " << track.probs.size()
              << " samples\n";
  }
  return kExitOk;
}

int cmd_evaluate(const fs::path& pred_dir, const fs::path& data_dir,
                 const fs::path& out_dir) {
  std::vector<double> scores;
  std::vector<std::int8_t> labels;
  for (const auto& dir : list_record_dirs(data_dir)) {
    fs::path pred_file = pred_dir / (dir.filename().string() + ".pred.f32");
    if (!fs::exists(pred_file)) continue;
    PredictionTrack pred = load_predictions(pred_file);
    AnnotationTrack ann = load_annotations(dir / "arousal.i8");
    std::size_t n = std::min(pred.probs.size(), ann.labels.size());
    scores.insert(scores.end(), pred.probs.begin(),
                  pred.probs.begin() + static_cast<std::ptrdiff_t>(n));
    labels.insert(labels.end(), ann.labels.begin(),
                  ann.labels.begin() + static_cast<std::ptrdiff_t>(n));
  }
  if (scores.empty()) throw ParseError("no matching prediction files");

  EvalReport report = evaluate(scores, labels);
  fs::create_directories(out_dir);
  {
    std::ofstream txt(out_dir / "report.txt", std::ios::trunc);
    txt.precision(6);
    txt << "AUPRC    " << report.auprc << "\n"
        << "AUROC    " << report.auroc << "\n"
        << "positives " << report.n_pos << "\n"
        << "negatives " << report.n_neg << "\n"
        << "masked    " << report.n_masked << "\n";
  }
  {
    std::ofstream csv(out_dir / "report.csv", std::ios::trunc);
    csv.precision(6);
    csv << "fold,auprc,auroc\n";
    csv << "all," << report.auprc << "," << report.auroc << "\n";
  }
  std::cout << "AUPRC " << report.auprc << "  AUROC " << report.auroc << "  ("
            << report.n_pos << " pos, " << report.n_neg << " neg, "
            << report.n_masked << " masked)\n";
  return kExitOk;
}

int cmd_plot_filterbank(const PipelineConfig& cfg, const fs::path& out_dir) {
  ScatteringNet net = build_scattering_net(kSampleRate, cfg.scatter_decimate,
                                           cfg.scatter_target_dim);
  fs::create_directories(out_dir);

  struct Curve {
    std::string id;
    std::vector<double> mag;  // sampled on grid bins 0..n/2
  };
  std::vector<Curve> curves;
  for (int i = 0; i < net.bank1.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "bank1_%02d", i);
    const auto& g = net.psi1_grid[static_cast<std::size_t>(i)];
    curves.push_back({id, {g.begin(), g.begin() + static_cast<std::ptrdiff_t>(net.n_fft / 2 + 1)}});
  }
  for (int i = 0; i < net.bank2.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "bank2_%02d", i);
    const auto& g = net.psi2_grid[static_cast<std::size_t>(i)];
    curves.push_back({id, {g.begin(), g.begin() + static_cast<std::ptrdiff_t>(net.n_fft / 2 + 1)}});
  }

  const double df = kSampleRate / static_cast<double>(net.n_fft);
  {
    std::ofstream csv(out_dir / "filterbank.csv", std::ios::trunc);
    csv.precision(8);
    csv << "omega_hz,filter_id,magnitude\n";
    for (const auto& c : curves)
      for (std::size_t k = 0; k < c.mag.size(); ++k)
        csv << (static_cast<double>(k) * df) << "," << c.id << "," << c.mag[k]
            << "\n";
  }
  {
    const int w = 1000, h = 300, margin = 40;
    std::ofstream svg(out_dir / "filterbank.svg", std::ios::trunc);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
        << "\" height=\"" << h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& c : curves) {
      const char* color = c.id.rfind("bank1", 0) == 0 ? "#1f77b4" : "#d62728";
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1\" points=\"";
      for (std::size_t k = 0; k < c.mag.size(); ++k) {
        double x = margin + (static_cast<double>(k) * df) / 100.0 *
                                (w - 2 * margin);
        double y = h - margin - c.mag[k] * (h - 2 * margin);
        svg << x << "," << y << " ";
      }
      svg << "\"/>\n";
    }
    svg << "<text x=\"" << (w / 2) << "\" y=\"" << (h - 8)
        << "\" text-anchor=\"middle\" font-size=\"12\">frequency (Hz, 0-100)"
        << "</text>\n</svg>\n";
  }
  std::cout << "plot-filterbank: " << curves.size() << " filter curves\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSG arousal detection pipeline"};
  app.require_subcommand(1);

  std::string config_file;
  PipelineConfig cfg;
  apply_env_defaults(cfg);

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic records");
  std::string synth_out = "data";
  int synth_records = 10;
  double synth_duration = 60.0;
  std::uint64_t synth_seed = 1;
  synth->add_option("--out", synth_out, "output data directory");
  synth->add_option("--records", synth_records, "number of records");
  synth->add_option("--duration", synth_duration, "seconds per record");
  synth->add_option("--seed", synth_seed, "base seed");

  // shared pipeline options
  std::string opt_data, opt_features_set, opt_out, opt_features_dir;
  std::uint64_t opt_seed = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "config file (key = value)");
    cmd->add_option("--data", opt_data, "data directory");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { opt_seed = v; seed_given = true; },
        "pipeline seed");
  };

  auto* extract = app.add_subcommand("extract", "extract feature matrices");
  add_common(extract);
  extract->add_option("--features", opt_features_set,
                      "feature set: physio75|scatter390|all465");
  std::string extract_out = "features";
  extract->add_option("--out", extract_out, "output feature directory");

  auto* train_cmd = app.add_subcommand("train", "train the classifier");
  add_common(train_cmd);
  std::string train_out = "model";
  int cv_folds = 0;
  bool pretrain_select = false;
  int select_k = 75;
  bool unidirectional = false;
  int opt_epochs = -1, opt_layers = -1, opt_hidden = -1, opt_restarts = -1;
  double opt_lr = -1;
  train_cmd->add_option("--features-dir", opt_features_dir, "feature directory");
  train_cmd->add_option("--out", train_out, "output model directory");
  train_cmd->add_option("--cv", cv_folds, "k-fold cross-validation");
  train_cmd->add_flag("--pretrain-select", pretrain_select,
                      "pre-train, rank features, retrain on top-k");
  train_cmd->add_option("--select-k", select_k, "features kept by selection");
  train_cmd->add_flag("--unidirectional", unidirectional,
                      "LSTM instead of BiLSTM layers");
  train_cmd->add_option("--epochs", opt_epochs, "training epochs");
  train_cmd->add_option("--layers", opt_layers, "recurrent layers");
  train_cmd->add_option("--hidden", opt_hidden, "hidden units per direction");
  train_cmd->add_option("--lr", opt_lr, "learning rate");
  train_cmd->add_option("--restarts", opt_restarts, "training restarts");

  auto* predict = app.add_subcommand("predict", "write prediction tracks");
  std::string model_file, ensemble_file, predict_out = "predictions",
              selection_file;
  predict->add_option("--model", model_file, "model checkpoint");
  predict->add_option("--ensemble", ensemble_file, "ensemble manifest");
  predict->add_option("--features-dir", opt_features_dir, "feature directory");
  predict->add_option("--out", predict_out, "output directory");
  predict->add_option("--select", selection_file, "feature selection file");

  auto* eval_cmd = app.add_subcommand("evaluate", "score predictions");
  add_common(eval_cmd);
  std::string pred_dir = "predictions", eval_out = "evaluation";
  eval_cmd->add_option("--pred", pred_dir, "prediction directory");
  eval_cmd->add_option("--out", eval_out, "output directory");

  auto* plot = app.add_subcommand("plot-filterbank",
                                  "emit filter bank CSV and SVG");
  add_common(plot);
  std::string plot_out = "filterbank";
  plot->add_option("--out", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_file.empty()) cfg = load_config(config_file);
    apply_env_defaults(cfg);
    if (!opt_data.empty()) cfg.data_dir = opt_data;
    if (seed_given) {
      cfg.seed = opt_seed;
      cfg.train.seed = opt_seed;
    }
    if (!opt_features_set.empty())
      cfg.feature_set = feature_set_from_string(opt_features_set);

    if (synth->parsed())
      return cmd_synth(synth_out, synth_records, synth_duration, synth_seed);
    if (extract->parsed()) return cmd_extract(cfg, extract_out);
    if (train_cmd->parsed()) {
      if (opt_epochs > 0) cfg.train.epochs = opt_epochs;
      if (opt_layers > 0) cfg.net.layers = opt_layers;
      if (opt_hidden > 0) cfg.net.hidden = opt_hidden;
      if (opt_lr > 0) cfg.train.lr = opt_lr;
      if (opt_restarts > 0) cfg.restarts = opt_restarts;
      if (unidirectional) cfg.net.bidirectional = false;
      return cmd_train(cfg, opt_features_dir.empty() ? "features" : opt_features_dir,
                       train_out, cv_folds, pretrain_select, select_k);
    }
    if (predict->parsed())
      return cmd_predict(model_file, ensemble_file,
                         opt_features_dir.empty() ? "features" : opt_features_dir,
                         predict_out, selection_file);
    if (eval_cmd->parsed()) return cmd_evaluate(pred_dir, cfg.data_dir, eval_out);
    if (plot->parsed()) return cmd_plot_filterbank(cfg, plot_out);
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
