#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "somnoscat/features_physio.hpp"

using namespace somnoscat;

namespace {

std::vector<double> tone(double freq, std::size_t n = kWindowLen,
                         double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq *
                              static_cast<double>(i) / kSampleRate +
                          phase);
  return x;
}

std::array<WindowedChannel, kNumChannels> windowed_record(
    const std::vector<Signal>& channel_signals) {
  std::array<WindowedChannel, kNumChannels> out;
  for (int c = 0; c < kNumChannels; ++c)
    out[static_cast<std::size_t>(c)] =
        segment(channel_signals[static_cast<std::size_t>(c)],
                channel_from_index(c));
  return out;
}

}  // namespace

TEST_CASE("feature name table has the documented layout") {
  const auto& names = physio_feature_names();
  REQUIRE(names.size() == kPhysioFeatureCount);
  // group boundaries: 13 + 6 + 5 + 12 + 5 + 21 + 8 + 3 + 2 = 75
  CHECK(names[0] == "xchan.r_abd_chest");
  CHECK(names[12] == "xchan.svd_ratio_s1_s3");
  CHECK(names[13] == "abd.std");
  CHECK(names[19] == "chest.rms");
  CHECK(names[24] == "airflow.rms");
  CHECK(names[36] == "sao2.mean");
  CHECK(names[41] == "f3m2.rms");
  CHECK(names[48] == "f4m1.rms");
  CHECK(names[55] == "eog.rms");
  CHECK(names[62] == "c3m2.rms");
  CHECK(names[70] == "chin.rms");
  CHECK(names[73] == "ecg.bpr_7.5_12__12_16");
}

TEST_CASE("cross_channel on identical windows is rank one") {
  std::vector<double> w = tone(0.3);
  auto f = cross_channel(w, w, w);
  for (int i : {0, 2, 4}) CHECK(f[static_cast<std::size_t>(i)] ==
                                doctest::Approx(1.0).epsilon(1e-9));
  for (int i : {1, 3, 5}) CHECK(f[static_cast<std::size_t>(i)] ==
                                doctest::Approx(0.0).epsilon(1e-9));
  CHECK(f[7] == doctest::Approx(0.0).epsilon(1e-6));  // sigma2
  CHECK(f[8] == doctest::Approx(0.0).epsilon(1e-6));  // sigma3
}

TEST_CASE("cross_channel on orthogonal equal-power windows") {
  // harmonics of the window length are orthogonal over the window
  std::vector<double> a = tone(1.0), b = tone(2.0), c = tone(3.0);
  auto f = cross_channel(a, b, c);
  for (int i : {0, 2, 4})
    CHECK(std::abs(f[static_cast<std::size_t>(i)]) < 0.05);
  CHECK(f[6] == doctest::Approx(f[8]).epsilon(0.05));  // sigma1 vs sigma3
}

TEST_CASE("abdominal features") {
  std::vector<double> zero(kWindowLen, 0.0);
  auto fz = abdominal_features(zero);
  for (double v : fz) CHECK(v == 0.0);

  auto f = abdominal_features(tone(0.3));
  CHECK(f[3] > 10.0 * f[4]);  // 0.01-0.4 Hz band dominates 0.4-0.75
}

TEST_CASE("chest features degenerate case") {
  std::vector<double> zero(kWindowLen, 0.0);
  for (double v : chest_features(zero)) CHECK(v == 0.0);
}

TEST_CASE("airflow features") {
  std::vector<double> flat(kWindowLen, 2.0);
  auto ff = airflow_features(flat);
  CHECK(ff[11] == 0.0);  // derivative combo guarded at STD(x) = 0

  auto f = airflow_features(tone(1.0));
  // the 0.75-1.2 Hz band beats all four others
  for (int i : {2, 3, 5, 6}) CHECK(f[4] > f[static_cast<std::size_t>(i)]);
}

TEST_CASE("sao2 features on a constant signal") {
  std::vector<double> sat(kWindowLen, 0.97);
  auto f = sao2_features(sat);
  CHECK(f[0] == doctest::Approx(0.97));
  CHECK(f[1] == 0.0);
  CHECK(f[2] == doctest::Approx(0.97));
  CHECK(f[3] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(f[4] == 0.0);
}

TEST_CASE("frontal EEG / EOG features") {
  std::vector<double> zero(kWindowLen, 0.0);
  for (double v : eeg_frontal_eog_features(zero)) CHECK(v == 0.0);

  auto f = eeg_frontal_eog_features(tone(2.0));
  PsdEstimate psd = window_psd(tone(2.0));
  double total = band_power(psd, 0.0, 100.0);
  CHECK(f[6] > 0.9 * total);  // 0.1-4 Hz captures nearly everything
}

TEST_CASE("central/occipital EEG features") {
  std::vector<double> zero(kWindowLen, 0.0);
  auto fz = eeg_co_features(zero);
  CHECK(fz[0] == 0.0);
  CHECK(fz[1] == 0.0);

  // an AR(2) input has a_3 near zero in a higher-order fit
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> x(kWindowLen + 200, 0.0);
  for (std::size_t i = 2; i < x.size(); ++i)
    x[i] = 0.9 * x[i - 1] - 0.3 * x[i - 2] + d(rng);
  std::vector<double> w(x.end() - static_cast<std::ptrdiff_t>(kWindowLen), x.end());
  auto f = eeg_co_features(w);
  CHECK(std::abs(f[1]) <= 0.05);
}

TEST_CASE("chin EMG and ECG band ratios") {
  std::vector<double> zero(kWindowLen, 0.0);
  for (double v : chin_emg_features(zero)) CHECK(v == 0.0);
  for (double v : ecg_features(zero)) CHECK(v == 0.0);

  // a trace of broadband noise keeps the out-of-band denominators above the
  // degenerate-ratio guard; the tone still dominates by orders of magnitude
  std::mt19937_64 rng(91);
  std::normal_distribution<double> d(0, 1e-3);
  auto noisy_tone = [&](double freq) {
    auto x = tone(freq);
    for (double& v : x) v += d(rng);
    return x;
  };
  auto chin = chin_emg_features(noisy_tone(10.0));
  CHECK(chin[2] > 10.0);

  auto ecg = ecg_features(noisy_tone(14.0));
  CHECK(ecg[1] > 10.0);
}

TEST_CASE("extract_physio contract on a zero record") {
  std::vector<Signal> sig(kNumChannels, Signal(2000, 0.0));
  auto channels = windowed_record(sig);
  PhysioFeatureVector f = extract_physio(channels, 0);
  const auto& names = physio_feature_names();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (names[i].rfind("xchan.p_", 0) == 0)
      CHECK(f[i] == 1.0);  // constant-input correlation rule
    else
      CHECK(f[i] == 0.0);
  }
}

TEST_CASE("extract_physio is finite and deterministic on random input") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> d(0, 1);
  std::vector<Signal> sig(kNumChannels);
  for (auto& s : sig) {
    s.resize(1000);
    for (double& v : s) v = d(rng);
  }
  auto channels = windowed_record(sig);
  PhysioFeatureVector a = extract_physio(channels, 0);
  PhysioFeatureVector b = extract_physio(channels, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::isfinite(a[i]));
    CHECK(a[i] == b[i]);
  }
  CHECK_THROWS(extract_physio(channels, 5));  // out of range window
}

TEST_CASE("cross-channel scale covariance") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> a(kWindowLen), b(kWindowLen), c(kWindowLen);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = d(rng);
    b[i] = 0.3 * a[i] + d(rng);
    c[i] = d(rng);
  }
  auto f1 = cross_channel(a, b, c);
  std::vector<double> a2 = a, b2 = b, c2 = c;
  const double scale = 2.5;
  for (auto* v : {&a2, &b2, &c2})
    for (double& s : *v) s *= scale;
  auto f2 = cross_channel(a2, b2, c2);
  for (int i = 0; i < 6; ++i)
    CHECK(f2[static_cast<std::size_t>(i)] ==
          doctest::Approx(f1[static_cast<std::size_t>(i)]).epsilon(1e-9));
  for (int i = 6; i < 9; ++i)
    CHECK(f2[static_cast<std::size_t>(i)] ==
          doctest::Approx(scale * f1[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("ratio features stay finite over adversarial windows") {
  std::mt19937_64 rng(70);
  std::normal_distribution<double> d(0, 1);
  std::vector<std::vector<double>> windows;
  windows.emplace_back(kWindowLen, 0.0);
  windows.emplace_back(kWindowLen, 5.0);
  std::vector<double> noisy(kWindowLen);
  for (double& v : noisy) v = d(rng);
  windows.push_back(noisy);
  for (const auto& w : windows) {
    for (double v : abdominal_features(w)) CHECK(std::isfinite(v));
    for (double v : chest_features(w)) CHECK(std::isfinite(v));
    for (double v : airflow_features(w)) CHECK(std::isfinite(v));
    for (double v : chin_emg_features(w)) CHECK(std::isfinite(v));
    for (double v : ecg_features(w)) CHECK(std::isfinite(v));
  }
}
