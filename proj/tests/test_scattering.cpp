#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "somnoscat/fft.hpp"
#include "somnoscat/scattering.hpp"

using namespace somnoscat;

namespace {

std::vector<double> random_window(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> x(kWindowLen);
  for (double& v : x) v = d(rng);
  return x;
}

std::vector<double> circular_shift(const std::vector<double>& x, std::size_t by) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[(i + by) % x.size()] = x[i];
  return y;
}

std::vector<double> order12(const ScatterCoeffs& c) {
  std::vector<double> v = c.s1;
  v.insert(v.end(), c.s2.begin(), c.s2.end());
  return v;
}

double l2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double rel_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

TEST_CASE("mother wavelet centers and filter counts") {
  FilterBank b1 = build_bank(2, 13, 1, kSampleRate);
  FilterBank b2 = build_bank(1, 8, 0, kSampleRate);
  CHECK(b1.omega0 == doctest::Approx(85.35).epsilon(0.01 / 85.35));
  CHECK(b2.omega0 == doctest::Approx(75.00).epsilon(0.01 / 75.0));
  CHECK(b1.size() == 14);
  CHECK(b2.size() == 8);
  CHECK_THROWS(build_bank(0, 13, 1, kSampleRate));
}

TEST_CASE("filter centers decrease and follow the dyadic law") {
  FilterBank b = build_bank(2, 13, 1, kSampleRate);
  for (std::size_t i = 1; i < b.centers.size(); ++i)
    CHECK(b.centers[i] < b.centers[i - 1]);
  for (int j = 0; j < b.j; ++j)
    CHECK(b.centers[static_cast<std::size_t>(j)] ==
          doctest::Approx(b.omega0 * std::pow(2.0, -j / 2.0)).epsilon(1e-9));
}

TEST_CASE("Littlewood-Paley peak stays under the bound") {
  ScatteringNet net = build_scattering_net();
  CHECK(littlewood_paley_peak(net, 1) <= 1.05);
  CHECK(littlewood_paley_peak(net, 2) <= 1.05);
}

TEST_CASE("every scattering path is frequency decreasing") {
  ScatteringNet net = build_scattering_net();
  CHECK(!net.paths.empty());
  for (const auto& p : net.paths)
    CHECK(net.bank2.centers[static_cast<std::size_t>(p.j2)] <
          net.bank1.centers[static_cast<std::size_t>(p.j1)]);
  // the path count is a pure function of the two fixed banks
  std::size_t expected = 0;
  for (double c1 : net.bank1.centers)
    for (double c2 : net.bank2.centers)
      if (c2 < c1) ++expected;
  CHECK(net.paths.size() == expected);
}

TEST_CASE("zero window scatters to zero; moduli are non-negative") {
  ScatteringNet net = build_scattering_net();
  std::vector<double> zero(kWindowLen, 0.0);
  ScatterCoeffs c = scatter_window(zero, net);
  CHECK(c.s0 == 0.0);
  for (double v : c.s1) CHECK(v == 0.0);
  for (double v : c.s2) CHECK(v == 0.0);

  ScatterCoeffs r = scatter_window(random_window(3), net);
  for (double v : r.s1) CHECK(v >= 0.0);
  for (double v : r.s2) CHECK(v >= 0.0);
}

TEST_CASE("small shifts move the coefficients less than large shifts") {
  ScatteringNet net = build_scattering_net();
  std::vector<double> x(kWindowLen, 0.0);
  x[kWindowLen / 2] = 1.0;
  auto base = order12(scatter_window(x, net));
  auto near = order12(scatter_window(circular_shift(x, 10), net));   // 0.05 s
  auto far = order12(scatter_window(circular_shift(x, 400), net));   // 2 s
  CHECK(rel_dist(base, near) < rel_dist(base, far));
}

TEST_CASE("energy decays from first-order moduli to second order") {
  ScatteringNet net = build_scattering_net();
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    std::vector<double> x = random_window(seed);
    ScatterCoeffs c = scatter_window(x, net);
    // independent first-order modulus energies from the exposed grids
    auto spec = fft_real(x, net.n_fft);
    double u1_sum = 0;
    for (const auto& psi : net.psi1_grid) {
      std::vector<std::complex<double>> y(net.n_fft);
      for (std::size_t k = 0; k < net.n_fft; ++k) y[k] = spec[k] * psi[k];
      fft(y, true);
      double mean = 0;
      for (std::size_t i = 0; i < kWindowLen; ++i) mean += std::abs(y[i]);
      u1_sum += mean / static_cast<double>(kWindowLen);
    }
    double s2_sum = 0;
    for (double v : c.s2) s2_sum += v;
    CHECK(s2_sum <= u1_sum);
  }
}

TEST_CASE("feature vector dimensions and padding") {
  ScatteringNet net = build_scattering_net();
  std::vector<double> x = random_window(8);
  std::vector<double> f = scatter_feature_vector(x, net);
  REQUIRE(f.size() == 65);
  // 1 + 14 + |paths| coefficients decimated by 4, zero-padded up to 65
  std::size_t kept = (1 + 14 + net.paths.size() + 3) / 4;
  for (std::size_t i = kept; i < f.size(); ++i) CHECK(f[i] == 0.0);
  CHECK(l2({f.begin(), f.begin() + static_cast<std::ptrdiff_t>(kept)}) > 0.0);
}

TEST_CASE("scatter feature names cover six channels") {
  const auto& names = scatter_feature_names();
  REQUIRE(names.size() == kScatterFeatureCount);
  CHECK(names.front() == "scat.eog.00");
  CHECK(names.back() == "scat.ecg.64");
}

TEST_CASE("a small waveform shift barely moves the feature vector") {
  ScatteringNet net = build_scattering_net();
  std::mt19937_64 rng(19);
  std::normal_distribution<double> d(0, 1);
  // band-limited waveform so the shift does not alias
  std::vector<double> x(kWindowLen, 0.0);
  for (int h = 1; h <= 12; ++h) {
    double a = d(rng), p = d(rng);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += a * std::sin(2.0 * std::numbers::pi * h *
                               static_cast<double>(i) /
                               static_cast<double>(kWindowLen) +
                           p);
  }
  std::vector<double> shifted = circular_shift(x, 20);  // 0.1 s
  auto fa = scatter_feature_vector(x, net);
  auto fb = scatter_feature_vector(shifted, net);
  CHECK(rel_dist(fa, fb) <= 0.2);
}
