#include "somnoscat/scattering.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "somnoscat/fft.hpp"

namespace somnoscat {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
const double kHalfMax = std::sqrt(2.0 * std::log(2.0));  // half-max offset in sigmas

double gaussian(double f, double center, double sigma) {
  double d = (f - center) / sigma;
  return std::exp(-0.5 * d * d);
}

/// Frequency of FFT bin k on a grid of length n (signed, Hz).
double bin_freq(std::size_t k, std::size_t n, double fs) {
  double f = static_cast<double>(k) * fs / static_cast<double>(n);
  if (k > n / 2) f -= fs;
  return f;
}

std::vector<double> sample_analytic(const FilterBank& bank, int idx,
                                    std::size_t n_fft) {
  std::vector<double> g(n_fft, 0.0);
  for (std::size_t k = 0; k <= n_fft / 2; ++k) {
    double f = bin_freq(k, n_fft, bank.fs);
    g[k] = gaussian(f, bank.centers[static_cast<std::size_t>(idx)],
                    bank.sigmas[static_cast<std::size_t>(idx)]);
  }
  return g;
}

double mean_real_ifft(std::vector<std::complex<double>> spec,
                      std::size_t window_len) {
  fft(spec, /*inverse=*/true);
  double sum = 0;
  for (std::size_t i = 0; i < window_len; ++i) sum += spec[i].real();
  return sum / static_cast<double>(window_len);
}

}  // namespace

FilterBank build_bank(int q, int j, int p, double fs) {
  if (q < 1 || j < 1 || p < 0 || fs <= 0)
    throw std::invalid_argument("invalid filter bank parameters");
  FilterBank bank;
  bank.q = q;
  bank.j = j;
  bank.p = p;
  bank.fs = fs;

  const double ratio = std::pow(2.0, -1.0 / static_cast<double>(q));
  bank.omega0 = (1.0 + ratio) / 2.0 * (fs / 2.0);

  // Envelope width: adjacent log-spaced filters cross at half maximum.
  const double alpha = (1.0 - ratio) / ((1.0 + ratio) * kHalfMax);

  for (int i = 0; i < j; ++i) {
    double c = bank.omega0 * std::pow(ratio, static_cast<double>(i));
    bank.centers.push_back(c);
    bank.sigmas.push_back(alpha * c);
  }
  // P linear-spaced filters below the last log filter, same bandwidth.
  double c_last = bank.centers.back();
  double sigma_last = bank.sigmas.back();
  for (int k = p; k >= 1; --k) {
    bank.centers.push_back(c_last * static_cast<double>(k) /
                           static_cast<double>(p + 1));
    bank.sigmas.push_back(sigma_last);
  }
  return bank;
}

ScatteringNet build_scattering_net(double fs, int decimate, std::size_t target_dim) {
  ScatteringNet net;
  net.bank1 = build_bank(2, 13, 1, fs);
  net.bank2 = build_bank(1, 8, 0, fs);
  net.decimate = decimate;
  net.target_dim = target_dim;

  // phi: Gaussian averaging over T = 5 s (time support ~ 4 sigma_t).
  const double kAveragingT = 5.0;
  const double sigma_t = kAveragingT / 4.0;
  net.phi_sigma_f = 1.0 / (kTwoPi * sigma_t);

  const std::size_t n = net.n_fft;
  net.phi_grid.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    net.phi_grid[k] = gaussian(bin_freq(k, n, fs), 0.0, net.phi_sigma_f);

  for (int i = 0; i < net.bank1.size(); ++i)
    net.psi1_grid.push_back(sample_analytic(net.bank1, i, n));
  for (int i = 0; i < net.bank2.size(); ++i)
    net.psi2_grid.push_back(sample_analytic(net.bank2, i, n));

  // Littlewood-Paley normalization: common scale so both banks peak <= 1.
  double peak = 1.0;
  for (int bank = 1; bank <= 2; ++bank) {
    const auto& psis = bank == 1 ? net.psi1_grid : net.psi2_grid;
    for (std::size_t k = 0; k <= n / 2; ++k) {
      double s = net.phi_grid[k] * net.phi_grid[k];
      for (const auto& g : psis) s += g[k] * g[k];
      peak = std::max(peak, s);
    }
  }
  const double scale = 1.0 / std::sqrt(peak);
  for (auto& g : net.psi1_grid)
    for (double& v : g) v *= scale;
  for (auto& g : net.psi2_grid)
    for (double& v : g) v *= scale;
  for (double& v : net.phi_grid) v *= scale;
  net.norm_scale1 = net.norm_scale2 = scale;

  // frequency-decreasing second-order paths
  for (int j1 = 0; j1 < net.bank1.size(); ++j1) {
    for (int j2 = 0; j2 < net.bank2.size(); ++j2) {
      if (net.bank2.centers[static_cast<std::size_t>(j2)] <
          net.bank1.centers[static_cast<std::size_t>(j1)])
        net.paths.push_back({j1, j2});
    }
  }
  return net;
}

double littlewood_paley_peak(const ScatteringNet& net, int bank) {
  const auto& psis = bank == 1 ? net.psi1_grid : net.psi2_grid;
  double peak = 0.0;
  for (std::size_t k = 0; k <= net.n_fft / 2; ++k) {
    double s = net.phi_grid[k] * net.phi_grid[k];
    for (const auto& g : psis) s += g[k] * g[k];
    peak = std::max(peak, s);
  }
  return peak;
}

ScatterCoeffs scatter_window(std::span<const double> window,
                             const ScatteringNet& net) {
  const std::size_t n = net.n_fft;
  std::vector<std::complex<double>> x_spec =
      fft_real(std::vector<double>(window.begin(), window.end()), n);
  const std::size_t wlen = window.size();

  auto apply_gain = [n](const std::vector<std::complex<double>>& spec,
                        const std::vector<double>& gain) {
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = spec[k] * gain[k];
    return out;
  };

  ScatterCoeffs coeffs;
  coeffs.s0 = mean_real_ifft(apply_gain(x_spec, net.phi_grid), wlen);

  // cache the modulus spectra U1 for the second order
  std::vector<std::vector<std::complex<double>>> u1_spec(
      static_cast<std::size_t>(net.bank1.size()));

  for (int j1 = 0; j1 < net.bank1.size(); ++j1) {
    auto y = apply_gain(x_spec, net.psi1_grid[static_cast<std::size_t>(j1)]);
    fft(y, /*inverse=*/true);
    std::vector<double> u1(n);
    for (std::size_t i = 0; i < n; ++i) u1[i] = std::abs(y[i]);
    u1_spec[static_cast<std::size_t>(j1)] = fft_real(u1, n);
    coeffs.s1.push_back(mean_real_ifft(
        apply_gain(u1_spec[static_cast<std::size_t>(j1)], net.phi_grid), wlen));
  }

  for (const auto& path : net.paths) {
    auto y = apply_gain(u1_spec[static_cast<std::size_t>(path.j1)],
                        net.psi2_grid[static_cast<std::size_t>(path.j2)]);
    fft(y, /*inverse=*/true);
    std::vector<double> u2(n);
    for (std::size_t i = 0; i < n; ++i) u2[i] = std::abs(y[i]);
    coeffs.s2.push_back(
        mean_real_ifft(apply_gain(fft_real(u2, n), net.phi_grid), wlen));
  }
  return coeffs;
}

std::vector<double> scatter_feature_vector(std::span<const double> window,
                                           const ScatteringNet& net) {
  ScatterCoeffs c = scatter_window(window, net);
  std::vector<double> all;
  all.reserve(1 + c.s1.size() + c.s2.size());
  all.push_back(c.s0);
  all.insert(all.end(), c.s1.begin(), c.s1.end());
  all.insert(all.end(), c.s2.begin(), c.s2.end());

  std::vector<double> out;
  for (std::size_t i = 0; i < all.size(); i += static_cast<std::size_t>(net.decimate))
    out.push_back(all[i]);
  out.resize(net.target_dim, 0.0);  // truncate or zero-pad
  return out;
}

const std::vector<std::string>& scatter_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    const char* chans[6] = {"eog", "abd", "chest", "airflow", "sao2", "ecg"};
    for (const char* ch : chans) {
      for (std::size_t i = 0; i < 65; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "scat.%s.%02zu", ch, i);
        v.push_back(buf);
      }
    }
    return v;
  }();
  return names;
}

std::vector<double> extract_scattering(
    const std::array<WindowedChannel, kNumChannels>& channels, std::size_t m,
    const ScatteringNet& net) {
  std::vector<double> out;
  out.reserve(kScatterFeatureCount);
  for (Channel ch : kScatterChannels) {
    const auto& wc = channels[static_cast<std::size_t>(ch)];
    if (m >= wc.count())
      throw std::invalid_argument("inconsistent window counts across channels");
    auto v = scatter_feature_vector(wc.windows[m], net);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace somnoscat
