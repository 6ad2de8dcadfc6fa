#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "somnoscat/preprocess.hpp"
#include "somnoscat/spectral.hpp"

namespace somnoscat {

inline constexpr std::size_t kPhysioFeatureCount = 75;

using PhysioFeatureVector = std::array<double, kPhysioFeatureCount>;

/// Fixed column layout:
/// cross-channel 13, abdominal 6, chest 5, airflow 12, SaO2 5,
/// F3-M2 7, F4-M1 7, EOG 7, C3-M2 2, C4-M1 2, O1-M2 2, O2-M1 2,
/// chin EMG 3, ECG 2.
const std::vector<std::string>& physio_feature_names();

// PSD conventions shared by all band-power features: AR(30) fit of the
// tapered window, 512-point grid over [0, 100] Hz.
inline constexpr int kBandAROrder = 30;
inline constexpr int kCoefAROrder = 10;
inline constexpr std::size_t kPsdGridSize = 512;

PsdEstimate window_psd(std::span<const double> window);

std::array<double, 13> cross_channel(std::span<const double> abd,
                                     std::span<const double> chest,
                                     std::span<const double> airflow);
std::array<double, 6> abdominal_features(std::span<const double> window);
std::array<double, 5> chest_features(std::span<const double> window);
std::array<double, 12> airflow_features(std::span<const double> window);
std::array<double, 5> sao2_features(std::span<const double> window);
std::array<double, 7> eeg_frontal_eog_features(std::span<const double> window);
std::array<double, 2> eeg_co_features(std::span<const double> window);
std::array<double, 3> chin_emg_features(std::span<const double> window);
std::array<double, 2> ecg_features(std::span<const double> window);

/// Concatenates all groups for window m of a consistently windowed record.
PhysioFeatureVector extract_physio(
    const std::array<WindowedChannel, kNumChannels>& channels, std::size_t m);

}  // namespace somnoscat
