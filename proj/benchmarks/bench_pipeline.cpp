#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "somnoscat/bilstm.hpp"
#include "somnoscat/features_physio.hpp"
#include "somnoscat/preprocess.hpp"
#include "somnoscat/scattering.hpp"
#include "somnoscat/spectral.hpp"
#include "somnoscat/synthetic.hpp"

namespace {

using namespace somnoscat;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

void BM_NotchFilter(benchmark::State& state) {
  Signal x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(notch_filter(x, 60.0, kSampleRate));
}
BENCHMARK(BM_NotchFilter)->Arg(12000)->Arg(120000);

void BM_BurgPsd(benchmark::State& state) {
  std::vector<double> x = noise(kWindowLen, 2);
  for (auto _ : state) {
    ArModel model = burg(x, 8);
    benchmark::DoNotOptimize(ar_psd(model, kSampleRate, 512));
  }
}
BENCHMARK(BM_BurgPsd);

void BM_PhysioWindow(benchmark::State& state) {
  auto [rec, ann] = generate_synthetic(3, 20.0, {});
  std::array<WindowedChannel, kNumChannels> channels;
  for (int c = 0; c < kNumChannels; ++c)
    channels[static_cast<std::size_t>(c)] =
        segment(rec.channels[static_cast<std::size_t>(c)], channel_from_index(c));
  for (auto _ : state)
    benchmark::DoNotOptimize(extract_physio(channels, 0));
}
BENCHMARK(BM_PhysioWindow);

void BM_ScatterWindow(benchmark::State& state) {
  ScatteringNet net = build_scattering_net();
  std::vector<double> x = noise(kWindowLen, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(scatter_feature_vector(x, net));
}
BENCHMARK(BM_ScatterWindow);

void BM_LstmForward(benchmark::State& state) {
  NetworkConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 24;
  cfg.input_dim = 465;
  BilstmModel model = init_model(cfg, 5);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> d(0, 1);
  Eigen::MatrixXd x(12, cfg.input_dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, x));
}
BENCHMARK(BM_LstmForward);

void BM_LstmBackward(benchmark::State& state) {
  NetworkConfig cfg;
  cfg.layers = 2;
  cfg.hidden = 24;
  cfg.input_dim = 465;
  BilstmModel model = init_model(cfg, 7);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d(0, 1);
  Eigen::MatrixXd x(12, cfg.input_dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = d(rng);
  std::vector<int> y(12);
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = static_cast<int>(t % 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(backward(model, x, y, 0.9, 0.1));
}
BENCHMARK(BM_LstmBackward);

}  // namespace
