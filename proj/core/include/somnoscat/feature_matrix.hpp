#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "somnoscat/record.hpp"
#include "somnoscat/scattering.hpp"

namespace somnoscat {

enum class FeatureSet { Physio75, Scatter390, All465 };

FeatureSet feature_set_from_string(const std::string& s);
const char* feature_set_name(FeatureSet set);
std::size_t feature_set_dim(FeatureSet set);
std::vector<std::string> feature_set_columns(FeatureSet set);

/// Per-record feature matrix: one row per 5-second window.
struct FeatureMatrix {
  std::string record_id;
  std::vector<std::string> columns;
  std::vector<float> data;  // row-major, rows x columns
  std::size_t rows = 0;

  std::size_t cols() const { return columns.size(); }
  Eigen::MatrixXd to_eigen() const;
};

/// Full extraction path: preprocess, window, feature computation.
FeatureMatrix extract_features(const PsgRecord& record, FeatureSet set,
                               const ScatteringNet& net);

// On-disk format: text header (key=value lines, a `columns=` list), an
// `end_header` line, then the row-major little-endian float32 payload.
void store_features(const FeatureMatrix& fm, const std::filesystem::path& file);
FeatureMatrix load_features(const std::filesystem::path& file);

}  // namespace somnoscat
