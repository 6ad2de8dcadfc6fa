#include "somnoscat/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace somnoscat {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Sum of randomly drawn sinusoids inside [f_lo, f_hi]; a cheap band-limited
/// noise surrogate that keeps the generator exactly reproducible.
struct BandNoise {
  std::vector<double> freq, phase, amp;

  BandNoise(std::mt19937_64& rng, int n_components, double f_lo, double f_hi,
            double total_amp) {
    std::uniform_real_distribution<double> uf(f_lo, f_hi);
    std::uniform_real_distribution<double> up(0.0, kTwoPi);
    std::uniform_real_distribution<double> ua(0.5, 1.5);
    double norm = total_amp / std::sqrt(static_cast<double>(n_components));
    for (int i = 0; i < n_components; ++i) {
      freq.push_back(uf(rng));
      phase.push_back(up(rng));
      amp.push_back(ua(rng) * norm);
    }
  }

  double operator()(double t) const {
    double v = 0;
    for (std::size_t i = 0; i < freq.size(); ++i)
      v += amp[i] * std::sin(kTwoPi * freq[i] * t + phase[i]);
    return v;
  }
};

enum class WindowState { None, Target, NonTarget };

WindowState state_at(const std::vector<ArousalWindow>& wins, double t) {
  for (const auto& w : wins) {
    if (t >= w.start_s && t < w.end_s)
      return w.kind == ArousalKind::Target ? WindowState::Target
                                          : WindowState::NonTarget;
  }
  return WindowState::None;
}

}  // namespace

std::pair<PsgRecord, AnnotationTrack> generate_synthetic(
    std::uint64_t seed, double duration_s,
    const std::vector<ArousalWindow>& arousal_windows) {
  if (duration_s <= 0 || std::fmod(duration_s, 5.0) != 0.0)
    throw std::invalid_argument("duration_s must be a positive multiple of 5");

  std::vector<ArousalWindow> wins = arousal_windows;
  std::sort(wins.begin(), wins.end(),
            [](const ArousalWindow& a, const ArousalWindow& b) {
              return a.start_s < b.start_s;
            });
  for (std::size_t i = 0; i < wins.size(); ++i) {
    const auto& w = wins[i];
    if (w.start_s < 0 || w.end_s > duration_s || w.start_s >= w.end_s)
      throw std::invalid_argument("arousal window outside record");
    if (i > 0 && wins[i - 1].end_s > w.start_s)
      throw std::invalid_argument("overlapping arousal windows");
  }

  const std::size_t n = static_cast<std::size_t>(duration_s * kSampleRate);
  PsgRecord rec;
  rec.id = "synthetic-" + std::to_string(seed);
  rec.fs = kSampleRate;

  for (int c = 0; c < kNumChannels; ++c) {
    Channel ch = static_cast<Channel>(c);
    // per-channel stream so channel sets stay independent of each other
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(c) + 1);
    Signal& sig = rec.channels[c];
    sig.resize(n);

    switch (ch) {
      case Channel::Abdominal:
      case Channel::Chest:
      case Channel::Airflow: {
        std::uniform_real_distribution<double> uf(0.25, 0.45);
        std::uniform_real_distribution<double> up(0.0, kTwoPi);
        double f_resp = uf(rng);
        double ph = up(rng);
        BandNoise noise(rng, 20, 0.05, 2.0, 0.15);
        for (std::size_t i = 0; i < n; ++i) {
          double t = static_cast<double>(i) / kSampleRate;
          double base = std::sin(kTwoPi * f_resp * t + ph);
          switch (state_at(wins, t)) {
            case WindowState::Target:
              base *= 2.5;  // respiratory-band amplitude boost
              break;
            case WindowState::NonTarget:
              base *= 0.25;  // apnea-like flattening
              break;
            case WindowState::None:
              break;
          }
          sig[i] = base + noise(t);
        }
        break;
      }
      case Channel::SaO2: {
        std::uniform_real_distribution<double> uf(0.01, 0.05);
        std::uniform_real_distribution<double> up(0.0, kTwoPi);
        double f_slow = uf(rng), ph = up(rng);
        std::normal_distribution<double> jitter(0.0, 5e-4);
        for (std::size_t i = 0; i < n; ++i) {
          double t = static_cast<double>(i) / kSampleRate;
          sig[i] = 0.97 + 0.01 * std::sin(kTwoPi * f_slow * t + ph) + jitter(rng);
        }
        break;
      }
      case Channel::Ecg: {
        std::uniform_real_distribution<double> uf(1.0, 1.3);
        double f_hr = uf(rng);
        BandNoise noise(rng, 30, 5.0, 25.0, 0.1);
        for (std::size_t i = 0; i < n; ++i) {
          double t = static_cast<double>(i) / kSampleRate;
          // narrow periodic peaks standing in for the QRS complex
          double phase = std::fmod(t * f_hr, 1.0);
          double d = std::min(phase, 1.0 - phase) / f_hr;
          double qrs = std::exp(-0.5 * (d / 0.02) * (d / 0.02));
          sig[i] = qrs + noise(t);
        }
        break;
      }
      case Channel::ChinEmg: {
        BandNoise noise(rng, 40, 20.0, 95.0, 0.5);
        for (std::size_t i = 0; i < n; ++i)
          sig[i] = noise(static_cast<double>(i) / kSampleRate);
        break;
      }
      default: {  // EEG channels and EOG: broadband 0.5-25 Hz activity
        BandNoise noise(rng, 60, 0.5, 25.0, 1.0);
        std::uniform_real_distribution<double> uf(1.0, 3.0);
        std::uniform_real_distribution<double> up(0.0, kTwoPi);
        double f_delta = uf(rng), ph = up(rng);
        for (std::size_t i = 0; i < n; ++i) {
          double t = static_cast<double>(i) / kSampleRate;
          double v = noise(t);
          if (state_at(wins, t) == WindowState::Target)
            v += 2.0 * std::sin(kTwoPi * f_delta * t + ph);  // delta burst
          sig[i] = v;
        }
        break;
      }
    }
  }

  AnnotationTrack track;
  track.labels.assign(n, 0);
  for (const auto& w : wins) {
    std::size_t a = static_cast<std::size_t>(w.start_s * kSampleRate);
    std::size_t b = static_cast<std::size_t>(w.end_s * kSampleRate);
    std::int8_t v = w.kind == ArousalKind::Target ? 1 : -1;
    for (std::size_t i = a; i < b && i < n; ++i) track.labels[i] = v;
  }

  // Quantize through the on-disk float32 precision so store/load is an
  // exact identity on generated records.
  for (auto& ch : rec.channels)
    for (double& v : ch) v = static_cast<double>(static_cast<float>(v));

  rec.validate();
  track.validate();
  return {std::move(rec), std::move(track)};
}

}  // namespace somnoscat
