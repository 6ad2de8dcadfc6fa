#include "somnoscat/feature_matrix.hpp"

#include <fstream>
#include <sstream>

#include "somnoscat/features_physio.hpp"
#include "somnoscat/preprocess.hpp"

namespace somnoscat {

FeatureSet feature_set_from_string(const std::string& s) {
  if (s == "physio75") return FeatureSet::Physio75;
  if (s == "scatter390") return FeatureSet::Scatter390;
  if (s == "all465") return FeatureSet::All465;
  throw std::invalid_argument("unknown feature set: " + s);
}

const char* feature_set_name(FeatureSet set) {
  switch (set) {
    case FeatureSet::Physio75: return "physio75";
    case FeatureSet::Scatter390: return "scatter390";
    case FeatureSet::All465: return "all465";
  }
  return "?";
}

std::size_t feature_set_dim(FeatureSet set) {
  switch (set) {
    case FeatureSet::Physio75: return kPhysioFeatureCount;
    case FeatureSet::Scatter390: return kScatterFeatureCount;
    case FeatureSet::All465: return kPhysioFeatureCount + kScatterFeatureCount;
  }
  return 0;
}

std::vector<std::string> feature_set_columns(FeatureSet set) {
  std::vector<std::string> cols;
  if (set == FeatureSet::Physio75 || set == FeatureSet::All465) {
    const auto& p = physio_feature_names();
    cols.insert(cols.end(), p.begin(), p.end());
  }
  if (set == FeatureSet::Scatter390 || set == FeatureSet::All465) {
    const auto& s = scatter_feature_names();
    cols.insert(cols.end(), s.begin(), s.end());
  }
  return cols;
}

Eigen::MatrixXd FeatureMatrix::to_eigen() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols()));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          data[r * cols() + c];
  return m;
}

FeatureMatrix extract_features(const PsgRecord& record, FeatureSet set,
                               const ScatteringNet& net) {
  PsgRecord pre = preprocess_record(record);

  std::array<WindowedChannel, kNumChannels> windows;
  for (int c = 0; c < kNumChannels; ++c)
    windows[static_cast<std::size_t>(c)] =
        segment(pre.channels[static_cast<std::size_t>(c)], static_cast<Channel>(c));
  const std::size_t m = windows[0].count();

  FeatureMatrix fm;
  fm.record_id = record.id;
  fm.columns = feature_set_columns(set);
  fm.rows = m;
  fm.data.reserve(m * fm.cols());

  for (std::size_t w = 0; w < m; ++w) {
    if (set == FeatureSet::Physio75 || set == FeatureSet::All465) {
      PhysioFeatureVector pv = extract_physio(windows, w);
      for (double v : pv) fm.data.push_back(static_cast<float>(v));
    }
    if (set == FeatureSet::Scatter390 || set == FeatureSet::All465) {
      std::vector<double> sv = extract_scattering(windows, w, net);
      for (double v : sv) fm.data.push_back(static_cast<float>(v));
    }
  }
  return fm;
}

void store_features(const FeatureMatrix& fm, const std::filesystem::path& file) {
  if (fm.data.size() != fm.rows * fm.cols())
    throw std::invalid_argument("feature matrix shape mismatch");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + file.string() + " for writing");
  out << "format=somnoscat-features\nversion=1\n"
      << "id=" << fm.record_id << "\n"
      << "rows=" << fm.rows << "\n"
      << "cols=" << fm.cols() << "\n"
      << "columns=";
  for (std::size_t i = 0; i < fm.columns.size(); ++i) {
    if (i) out << ",";
    out << fm.columns[i];
  }
  out << "\nend_header\n";
  out.write(reinterpret_cast<const char*>(fm.data.data()),
            static_cast<std::streamsize>(fm.data.size() * sizeof(float)));
  if (!out) throw ParseError("write failed: " + file.string());
}

FeatureMatrix load_features(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("cannot open " + file.string());

  FeatureMatrix fm;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "end_header") break;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    if (key == "id") fm.record_id = val;
    else if (key == "rows") fm.rows = std::stoull(val);
    else if (key == "cols") cols = std::stoull(val);
    else if (key == "columns") {
      std::stringstream ss(val);
      std::string col;
      while (std::getline(ss, col, ',')) fm.columns.push_back(col);
    }
  }
  if (fm.columns.size() != cols)
    throw ParseError("feature header column count mismatch in " + file.string());

  fm.data.resize(fm.rows * cols);
  in.read(reinterpret_cast<char*>(fm.data.data()),
          static_cast<std::streamsize>(fm.data.size() * sizeof(float)));
  if (!in) throw ParseError("truncated feature payload: " + file.string());
  return fm;
}

}  // namespace somnoscat
