#include <cstdint>
#include <cstring>
#include <fstream>

#include "somnoscat/bilstm.hpp"
#include "somnoscat/record.hpp"

namespace somnoscat {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_tensor(std::ostream& out, const std::string& name,
                  const double* data, std::uint32_t rows, std::uint32_t cols) {
  write_u32(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u32(out, rows);
  write_u32(out, cols);
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(sizeof(double) * rows * cols));
}

void read_tensor(std::istream& in, const std::string& expected_name,
                 double* data, std::uint32_t rows, std::uint32_t cols) {
  std::uint32_t name_len = read_u32(in);
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  if (name != expected_name)
    throw ParseError("checkpoint tensor order mismatch: expected " +
                     expected_name + ", got " + name);
  std::uint32_t r = read_u32(in), c = read_u32(in);
  if (r != rows || c != cols)
    throw ParseError("checkpoint tensor shape mismatch for " + name);
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(sizeof(double) * rows * cols));
  if (!in) throw ParseError("truncated checkpoint tensor " + name);
}

std::string tensor_name(int layer, const char* dir, const char* which) {
  return "layer" + std::to_string(layer) + "." + dir + "." + which;
}

}  // namespace

void save_model(const BilstmModel& model, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + file.string() + " for writing");

  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(model.cfg.layers));
  write_u32(out, static_cast<std::uint32_t>(model.cfg.hidden));
  write_u32(out, model.cfg.bidirectional ? 1 : 0);
  write_u32(out, static_cast<std::uint32_t>(model.cfg.input_dim));
  write_f64(out, model.cfg.leaky_slope);
  write_u32(out, static_cast<std::uint32_t>(model.epochs_trained));
  write_f64(out, model.final_loss);

  for (int l = 0; l < model.cfg.layers; ++l) {
    const auto& lp = model.params.layers[static_cast<std::size_t>(l)];
    for (auto [dir, gp] : {std::pair{"fwd", &lp.fwd}, {"bwd", &lp.bwd}}) {
      if (gp == &lp.bwd && !model.cfg.bidirectional) continue;
      write_tensor(out, tensor_name(l, dir, "w"), gp->w.data(),
                   static_cast<std::uint32_t>(gp->w.rows()),
                   static_cast<std::uint32_t>(gp->w.cols()));
      write_tensor(out, tensor_name(l, dir, "u"), gp->u.data(),
                   static_cast<std::uint32_t>(gp->u.rows()),
                   static_cast<std::uint32_t>(gp->u.cols()));
      write_tensor(out, tensor_name(l, dir, "b"), gp->b.data(),
                   static_cast<std::uint32_t>(gp->b.size()), 1);
    }
  }
  write_tensor(out, "head.w", model.params.head_w.data(),
               static_cast<std::uint32_t>(model.params.head_w.rows()),
               static_cast<std::uint32_t>(model.params.head_w.cols()));
  write_tensor(out, "head.b", model.params.head_b.data(),
               static_cast<std::uint32_t>(model.params.head_b.size()), 1);
  if (!out) throw ParseError("write failed: " + file.string());
}

BilstmModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("cannot open " + file.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("not a model checkpoint: " + file.string());
  if (read_u32(in) != kVersion)
    throw ParseError("unsupported checkpoint version in " + file.string());

  NetworkConfig cfg;
  cfg.layers = static_cast<int>(read_u32(in));
  cfg.hidden = static_cast<int>(read_u32(in));
  cfg.bidirectional = read_u32(in) != 0;
  cfg.input_dim = static_cast<int>(read_u32(in));
  cfg.leaky_slope = read_f64(in);

  BilstmModel model = init_model(cfg, 0);
  model.epochs_trained = static_cast<int>(read_u32(in));
  model.final_loss = read_f64(in);

  for (int l = 0; l < cfg.layers; ++l) {
    auto& lp = model.params.layers[static_cast<std::size_t>(l)];
    for (auto [dir, gp] : {std::pair{"fwd", &lp.fwd}, {"bwd", &lp.bwd}}) {
      if (gp == &lp.bwd && !cfg.bidirectional) continue;
      read_tensor(in, tensor_name(l, dir, "w"), gp->w.data(),
                  static_cast<std::uint32_t>(gp->w.rows()),
                  static_cast<std::uint32_t>(gp->w.cols()));
      read_tensor(in, tensor_name(l, dir, "u"), gp->u.data(),
                  static_cast<std::uint32_t>(gp->u.rows()),
                  static_cast<std::uint32_t>(gp->u.cols()));
      read_tensor(in, tensor_name(l, dir, "b"), gp->b.data(),
                  static_cast<std::uint32_t>(gp->b.size()), 1);
    }
  }
  read_tensor(in, "head.w", model.params.head_w.data(),
              static_cast<std::uint32_t>(model.params.head_w.rows()),
              static_cast<std::uint32_t>(model.params.head_w.cols()));
  read_tensor(in, "head.b", model.params.head_b.data(),
              static_cast<std::uint32_t>(model.params.head_b.size()), 1);
  return model;
}

}  // namespace somnoscat
