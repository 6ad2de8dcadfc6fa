#pragma once

#include <filesystem>
#include <string>

#include "somnoscat/bilstm.hpp"
#include "somnoscat/feature_matrix.hpp"

namespace somnoscat {

/// Orchestration config: `key = value` lines with dotted sections; CLI flags
/// override file values; SOMNOSCAT_DATA_DIR provides the data_dir default.
struct PipelineConfig {
  std::string data_dir;
  std::uint64_t seed = 1;
  FeatureSet feature_set = FeatureSet::All465;
  NetworkConfig net;
  TrainConfig train;
  int scatter_decimate = 4;
  std::size_t scatter_target_dim = 65;
  int restarts = 1;
  int jobs = 1;

  bool operator==(const PipelineConfig&) const = default;
};

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& file);
std::string render_config(const PipelineConfig& cfg);

/// Applies the SOMNOSCAT_DATA_DIR default when data_dir is empty.
void apply_env_defaults(PipelineConfig& cfg);

}  // namespace somnoscat
