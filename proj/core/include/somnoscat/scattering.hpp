#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "somnoscat/preprocess.hpp"

namespace somnoscat {

/// One analytic Gabor filter bank: J log-spaced wavelets (center of psi_j is
/// 2^{-j/Q} * omega0) followed by P equally-spaced low-frequency filters
/// sharing psi_{J-1}'s bandwidth.
struct FilterBank {
  int q = 1;
  int j = 1;
  int p = 0;
  double fs = kSampleRate;
  double omega0 = 0;               // mother center, Hz
  std::vector<double> centers;     // Hz, strictly decreasing, size J + P
  std::vector<double> sigmas;      // Gaussian envelope std per filter, Hz

  int size() const { return j + p; }
};

FilterBank build_bank(int q, int j, int p, double fs);

struct ScatteringPath {
  int j1 = 0;
  int j2 = 0;
};

struct ScatteringNet {
  FilterBank bank1;                       // Q=2, J=13, P=1
  FilterBank bank2;                       // Q=1, J=8, P=0
  double phi_sigma_f = 0;                 // Gaussian low-pass std, Hz
  double norm_scale1 = 1.0;               // Littlewood-Paley normalization
  double norm_scale2 = 1.0;
  std::size_t n_fft = 2048;
  std::vector<ScatteringPath> paths;      // frequency-decreasing only

  // filters sampled on the padded FFT grid (real, analytic: zero above Nyquist)
  std::vector<std::vector<double>> psi1_grid;
  std::vector<std::vector<double>> psi2_grid;
  std::vector<double> phi_grid;

  int decimate = 4;
  std::size_t target_dim = 65;
};

/// Default configuration: two banks at fs = 200 Hz, phi averaging over 5 s.
ScatteringNet build_scattering_net(double fs = kSampleRate, int decimate = 4,
                                   std::size_t target_dim = 65);

/// Max over the frequency grid of |phi|^2 + sum_j |psi_j|^2 for a bank
/// (after normalization), used by the stability checks.
double littlewood_paley_peak(const ScatteringNet& net, int bank);

struct ScatterCoeffs {
  double s0 = 0;
  std::vector<double> s1;  // one per bank1 filter
  std::vector<double> s2;  // one per path, order of net.paths
};

/// Order-0/1/2 time-averaged scattering coefficients of one 1000-sample
/// window (zero-padded to n_fft, circular convolutions in frequency domain).
ScatterCoeffs scatter_window(std::span<const double> window,
                             const ScatteringNet& net);

/// [s0, s1..., s2...] decimated by keeping every `decimate`-th entry, then
/// truncated / zero-padded to target_dim.
std::vector<double> scatter_feature_vector(std::span<const double> window,
                                           const ScatteringNet& net);

inline constexpr std::array<Channel, 6> kScatterChannels = {
    Channel::EogL,  Channel::Abdominal, Channel::Chest,
    Channel::Airflow, Channel::SaO2,    Channel::Ecg};

inline constexpr std::size_t kScatterFeatureCount = 65 * 6;  // 390

const std::vector<std::string>& scatter_feature_names();

/// 390-entry vector for window m: 65 features per scattering channel.
std::vector<double> extract_scattering(
    const std::array<WindowedChannel, kNumChannels>& channels, std::size_t m,
    const ScatteringNet& net);

}  // namespace somnoscat
