#pragma once

#include <cstdint>
#include <vector>

#include "somnoscat/record.hpp"

namespace somnoscat {

inline constexpr std::size_t kWindowLen = 1000;  // 5 s at 200 Hz

/// 5-second nonoverlapping windows of one channel, each multiplied by the
/// symmetric triangular taper (peak 1 at center, endpoints 0).
struct WindowedChannel {
  Channel source = Channel::F3M2;
  std::vector<std::vector<double>> windows;  // M x 1000
  std::vector<double> taper;                 // the 1000-point weight profile

  std::size_t count() const { return windows.size(); }
};

struct WindowLabels {
  std::vector<std::int8_t> labels;  // one of {-1, 0, 1} per window
};

/// Zero-phase second-order notch at f0: the squared-magnitude response of
/// the biquad (its forward-backward cascade) with a 2 Hz -3 dB width.
Signal notch_filter(const Signal& signal, double f0, double fs);

/// Zero out samples beyond 8x the whole-recording IQR, then divide by 8x IQR.
/// Output always lies in [-1, 1]; a degenerate IQR (< 1e-12) maps to zeros.
Signal clip_and_normalize(const Signal& signal);

/// Notch at 60 and 80 Hz on every channel; clip/normalize on all channels
/// except SaO2 and ECG.
PsgRecord preprocess_record(const PsgRecord& record);

std::vector<double> triangular_taper(std::size_t len);

/// Splits into floor(N/1000) tapered windows; trailing remainder dropped.
WindowedChannel segment(const Signal& signal, Channel source = Channel::F3M2);

/// Majority label per window; ties broken by priority 1 > -1 > 0.
WindowLabels window_labels(const AnnotationTrack& track);

}  // namespace somnoscat
