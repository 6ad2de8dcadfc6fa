#include "somnoscat/features_physio.hpp"

#include <cmath>
#include <stdexcept>

namespace somnoscat {

namespace {

constexpr double kGuard = 1e-15;

double guarded_ratio(double num, double den) {
  return den < kGuard ? 0.0 : num / den;
}

double ar_coeff(std::span<const double> window, int order, int index1based) {
  ArModel model = burg(window, order);
  return model.coeffs[static_cast<std::size_t>(index1based - 1)];
}

std::vector<std::string> build_names() {
  std::vector<std::string> names;
  const char* pairs[3] = {"abd_chest", "abd_airflow", "chest_airflow"};
  for (const char* p : pairs) {
    names.push_back(std::string("xchan.r_") + p);
    names.push_back(std::string("xchan.p_") + p);
  }
  for (const char* s : {"sigma1", "sigma2", "sigma3", "arith_mean", "geom_mean",
                        "std", "ratio_s1_s3"})
    names.push_back(std::string("xchan.svd_") + s);

  for (const char* s : {"std", "rms", "ar10_a9", "bp_0.01_0.4", "bp_0.4_0.75",
                        "bpr_0.75_1.2__1.2_1.6"})
    names.push_back(std::string("abd.") + s);

  for (const char* s :
       {"rms", "std", "skew", "bp_0.01_0.4", "bpr_0.75_1.2__1.2_1.6"})
    names.push_back(std::string("chest.") + s);

  for (const char* s :
       {"rms", "skew", "bp_0.01_0.4", "bp_0.4_0.75", "bp_0.75_1.2",
        "bp_1.2_1.6", "bp_1.6_3", "bpx_2x4", "bpx_3x4", "bpr_3_4",
        "bpr_1__3p5", "deriv_std_combo"})
    names.push_back(std::string("airflow.") + s);

  for (const char* s : {"mean", "std", "rms", "mean_freq", "diff_std"})
    names.push_back(std::string("sao2.") + s);

  for (const char* ch : {"f3m2", "f4m1", "eog"})
    for (const char* s :
         {"rms", "std", "skew", "kurt", "ar10_a3", "ar10_a5", "bp_0.1_4"})
      names.push_back(std::string(ch) + "." + s);

  for (const char* ch : {"c3m2", "c4m1", "o1m2", "o2m1"})
    for (const char* s : {"rms", "ar10_a3"})
      names.push_back(std::string(ch) + "." + s);

  for (const char* s : {"rms", "kurt", "bpr_low_high"})
    names.push_back(std::string("chin.") + s);
  names.push_back("ecg.bpr_7.5_12__12_16");
  names.push_back("ecg.bpr_12_16__rest");
  return names;
}

}  // namespace

const std::vector<std::string>& physio_feature_names() {
  static const std::vector<std::string> names = build_names();
  return names;
}

PsdEstimate window_psd(std::span<const double> window) {
  ArModel model = burg(window, kBandAROrder);
  return ar_psd(model, kSampleRate, kPsdGridSize);
}

std::array<double, 13> cross_channel(std::span<const double> abd,
                                     std::span<const double> chest,
                                     std::span<const double> airflow) {
  std::array<double, 13> out{};
  Correlation c01 = pearson(abd, chest);
  Correlation c02 = pearson(abd, airflow);
  Correlation c12 = pearson(chest, airflow);
  out[0] = c01.r;
  out[1] = c01.p;
  out[2] = c02.r;
  out[3] = c02.p;
  out[4] = c12.r;
  out[5] = c12.p;
  SvdFeatures svd = svd_features(abd, chest, airflow);
  out[6] = svd.sigma[0];
  out[7] = svd.sigma[1];
  out[8] = svd.sigma[2];
  out[9] = svd.arith_mean;
  out[10] = svd.geom_mean;
  out[11] = svd.std_dev;
  out[12] = svd.ratio;
  return out;
}

std::array<double, 6> abdominal_features(std::span<const double> window) {
  Moments m = moments(window);
  PsdEstimate psd = window_psd(window);
  std::array<double, 6> out{};
  out[0] = m.std_dev;
  out[1] = m.rms;
  out[2] = ar_coeff(window, kCoefAROrder, 9);
  out[3] = band_power(psd, 0.01, 0.4);
  out[4] = band_power(psd, 0.4, 0.75);
  out[5] = guarded_ratio(band_power(psd, 0.75, 1.2), band_power(psd, 1.2, 1.6));
  return out;
}

std::array<double, 5> chest_features(std::span<const double> window) {
  Moments m = moments(window);
  PsdEstimate psd = window_psd(window);
  std::array<double, 5> out{};
  out[0] = m.rms;
  out[1] = m.std_dev;
  out[2] = m.skewness;
  out[3] = band_power(psd, 0.01, 0.4);
  out[4] = guarded_ratio(band_power(psd, 0.75, 1.2), band_power(psd, 1.2, 1.6));
  return out;
}

std::array<double, 12> airflow_features(std::span<const double> window) {
  Moments m = moments(window);
  PsdEstimate psd = window_psd(window);
  double p1 = band_power(psd, 0.01, 0.4);
  double p2 = band_power(psd, 0.4, 0.75);
  double p3 = band_power(psd, 0.75, 1.2);
  double p4 = band_power(psd, 1.2, 1.6);
  double p5 = band_power(psd, 1.6, 3.0);

  std::array<double, 12> out{};
  out[0] = m.rms;
  out[1] = m.skewness;
  out[2] = p1;
  out[3] = p2;
  out[4] = p3;
  out[5] = p4;
  out[6] = p5;
  out[7] = p2 * p4;
  out[8] = p3 * p4;
  out[9] = guarded_ratio(p3, p4);
  out[10] = guarded_ratio(p1, p3 + p5);
  auto [d1, d2] = diffs(window);
  double std_x = moments(window).std_dev;
  double std_d1 = moments(d1).std_dev;
  double std_d2 = moments(d2).std_dev;
  out[11] = guarded_ratio(std_d2 * std_d1, std_x);
  return out;
}

std::array<double, 5> sao2_features(std::span<const double> window) {
  Moments m = moments(window);
  PsdEstimate psd = window_psd(window);
  auto [d1, d2] = diffs(window);
  (void)d2;
  std::array<double, 5> out{};
  out[0] = m.mean;
  out[1] = m.std_dev;
  out[2] = m.rms;
  out[3] = mean_frequency(psd);
  out[4] = moments(d1).std_dev;
  return out;
}

std::array<double, 7> eeg_frontal_eog_features(std::span<const double> window) {
  Moments m = moments(window);
  ArModel model = burg(window, kCoefAROrder);
  PsdEstimate psd = window_psd(window);
  std::array<double, 7> out{};
  out[0] = m.rms;
  out[1] = m.std_dev;
  out[2] = m.skewness;
  out[3] = m.kurtosis;
  out[4] = model.coeffs[2];  // a_3
  out[5] = model.coeffs[4];  // a_5
  out[6] = band_power(psd, 0.1, 4.0);
  return out;
}

std::array<double, 2> eeg_co_features(std::span<const double> window) {
  Moments m = moments(window);
  std::array<double, 2> out{};
  out[0] = m.rms;
  out[1] = ar_coeff(window, kCoefAROrder, 3);
  return out;
}

std::array<double, 3> chin_emg_features(std::span<const double> window) {
  Moments m = moments(window);
  PsdEstimate psd = window_psd(window);
  std::array<double, 3> out{};
  out[0] = m.rms;
  out[1] = m.kurtosis;
  out[2] = guarded_ratio(band_power(psd, 0.1, 15.0),
                         band_power(psd, 30.0, 45.0) + band_power(psd, 70.0, 100.0));
  return out;
}

std::array<double, 2> ecg_features(std::span<const double> window) {
  PsdEstimate psd = window_psd(window);
  double p_a = band_power(psd, 7.5, 12.0);
  double p_b = band_power(psd, 12.0, 16.0);
  double p_c = band_power(psd, 16.0, 25.0);
  std::array<double, 2> out{};
  out[0] = guarded_ratio(p_a, p_b);
  out[1] = guarded_ratio(p_b, p_a + p_c);
  return out;
}

PhysioFeatureVector extract_physio(
    const std::array<WindowedChannel, kNumChannels>& channels, std::size_t m) {
  for (const auto& wc : channels) {
    if (m >= wc.count())
      throw std::invalid_argument("inconsistent window counts across channels");
  }
  auto win = [&](Channel c) -> std::span<const double> {
    return channels[static_cast<std::size_t>(c)].windows[m];
  };

  PhysioFeatureVector out{};
  std::size_t pos = 0;
  auto append = [&](auto&& values) {
    for (double v : values) out[pos++] = v;
  };

  append(cross_channel(win(Channel::Abdominal), win(Channel::Chest),
                       win(Channel::Airflow)));
  append(abdominal_features(win(Channel::Abdominal)));
  append(chest_features(win(Channel::Chest)));
  append(airflow_features(win(Channel::Airflow)));
  append(sao2_features(win(Channel::SaO2)));
  append(eeg_frontal_eog_features(win(Channel::F3M2)));
  append(eeg_frontal_eog_features(win(Channel::F4M1)));
  append(eeg_frontal_eog_features(win(Channel::EogL)));
  append(eeg_co_features(win(Channel::C3M2)));
  append(eeg_co_features(win(Channel::C4M1)));
  append(eeg_co_features(win(Channel::O1M2)));
  append(eeg_co_features(win(Channel::O2M1)));
  append(chin_emg_features(win(Channel::ChinEmg)));
  append(ecg_features(win(Channel::Ecg)));

  if (pos != kPhysioFeatureCount)
    throw std::logic_error("physio feature layout out of sync");
  return out;
}

}  // namespace somnoscat
