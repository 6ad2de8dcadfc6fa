#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace somnoscat {

using Signal = std::vector<double>;

/// The 13 PSG channels in their fixed order. SaO2 is assumed already
/// upsampled to the common 200 Hz rate at ingestion.
enum class Channel : int {
  F3M2 = 0,
  F4M1,
  C3M2,
  C4M1,
  O1M2,
  O2M1,
  EogL,
  ChinEmg,
  Abdominal,
  Chest,
  Airflow,
  SaO2,
  Ecg,
};

inline constexpr int kNumChannels = 13;
inline constexpr double kSampleRate = 200.0;

const char* channel_name(Channel c);
Channel channel_from_index(int idx);  // 0-based

/// True for channels that get the clip/normalize stage (all except SaO2 and ECG).
inline bool channel_is_clipped(Channel c) {
  return c != Channel::SaO2 && c != Channel::Ecg;
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PsgRecord {
  std::string id;
  double fs = kSampleRate;
  std::array<Signal, kNumChannels> channels;

  std::size_t length() const { return channels[0].size(); }
  const Signal& channel(Channel c) const { return channels[static_cast<int>(c)]; }
  Signal& channel(Channel c) { return channels[static_cast<int>(c)]; }

  /// Throws ParseError on any invariant violation (lengths, fs, finiteness).
  void validate() const;
};

/// Per-sample labels: 1 = target arousal, 0 = non-arousal, -1 = non-target arousal.
struct AnnotationTrack {
  std::vector<std::int8_t> labels;
  void validate() const;
};

/// Per-sample probability of target arousal.
struct PredictionTrack {
  std::vector<double> probs;
  void validate() const;
};

// Record directory layout: header.txt, ch01.f32 .. ch13.f32,
// optional arousal.i8 and pred.f32. All binary payloads little-endian.
PsgRecord load_record(const std::filesystem::path& dir);
void store_record(const PsgRecord& record, const std::filesystem::path& dir);

AnnotationTrack load_annotations(const std::filesystem::path& file);
void store_annotations(const AnnotationTrack& track, const std::filesystem::path& file);

PredictionTrack load_predictions(const std::filesystem::path& file);
void store_predictions(const PredictionTrack& track, const std::filesystem::path& file);

}  // namespace somnoscat
