#include "somnoscat/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace somnoscat {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed config line: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));

    if (key == "data_dir") cfg.data_dir = val;
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "feature_set") cfg.feature_set = feature_set_from_string(val);
    else if (key == "restarts") cfg.restarts = std::stoi(val);
    else if (key == "jobs") cfg.jobs = std::stoi(val);
    else if (key == "net.layers") cfg.net.layers = std::stoi(val);
    else if (key == "net.hidden") cfg.net.hidden = std::stoi(val);
    else if (key == "net.leaky_slope") cfg.net.leaky_slope = std::stod(val);
    else if (key == "net.bidirectional") cfg.net.bidirectional = val == "true";
    else if (key == "train.lr") cfg.train.lr = std::stod(val);
    else if (key == "train.beta1") cfg.train.beta1 = std::stod(val);
    else if (key == "train.beta2") cfg.train.beta2 = std::stod(val);
    else if (key == "train.epochs") cfg.train.epochs = std::stoi(val);
    else if (key == "train.lr_decay_every") cfg.train.lr_decay_every = std::stoi(val);
    else if (key == "train.lr_decay") cfg.train.lr_decay = std::stod(val);
    else if (key == "train.clip_norm") cfg.train.clip_norm = std::stod(val);
    else if (key == "train.batch_subjects") cfg.train.batch_subjects = std::stoi(val);
    else if (key == "train.weight_target") cfg.train.weight_target = std::stod(val);
    else if (key == "train.weight_nonarousal")
      cfg.train.weight_nonarousal = std::stod(val);
    else if (key == "scatter.decimate") cfg.scatter_decimate = std::stoi(val);
    else if (key == "scatter.target_dim") cfg.scatter_target_dim = std::stoull(val);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  cfg.train.seed = cfg.seed;
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "data_dir = " << cfg.data_dir << "\n"
      << "seed = " << cfg.seed << "\n"
      << "feature_set = " << feature_set_name(cfg.feature_set) << "\n"
      << "restarts = " << cfg.restarts << "\n"
      << "jobs = " << cfg.jobs << "\n"
      << "net.layers = " << cfg.net.layers << "\n"
      << "net.hidden = " << cfg.net.hidden << "\n"
      << "net.leaky_slope = " << cfg.net.leaky_slope << "\n"
      << "net.bidirectional = " << (cfg.net.bidirectional ? "true" : "false") << "\n"
      << "train.lr = " << cfg.train.lr << "\n"
      << "train.beta1 = " << cfg.train.beta1 << "\n"
      << "train.beta2 = " << cfg.train.beta2 << "\n"
      << "train.epochs = " << cfg.train.epochs << "\n"
      << "train.lr_decay_every = " << cfg.train.lr_decay_every << "\n"
      << "train.lr_decay = " << cfg.train.lr_decay << "\n"
      << "train.clip_norm = " << cfg.train.clip_norm << "\n"
      << "train.batch_subjects = " << cfg.train.batch_subjects << "\n"
      << "train.weight_target = " << cfg.train.weight_target << "\n"
      << "train.weight_nonarousal = " << cfg.train.weight_nonarousal << "\n"
      << "scatter.decimate = " << cfg.scatter_decimate << "\n"
      << "scatter.target_dim = " << cfg.scatter_target_dim << "\n";
  return out.str();
}

void apply_env_defaults(PipelineConfig& cfg) {
  if (cfg.data_dir.empty()) {
    if (const char* env = std::getenv("SOMNOSCAT_DATA_DIR")) cfg.data_dir = env;
  }
}

}  // namespace somnoscat
