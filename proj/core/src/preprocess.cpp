#include "somnoscat/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "somnoscat/fft.hpp"

namespace somnoscat {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Biquad {
  double b0, b1, b2, a1, a2;
};

/// RBJ-cookbook notch. bw is the -3 dB bandwidth of a single pass.
Biquad design_notch(double f0, double fs, double bw) {
  double w0 = 2.0 * kPi * f0 / fs;
  double q = f0 / bw;
  double alpha = std::sin(w0) / (2.0 * q);
  double a0 = 1.0 + alpha;
  Biquad bq;
  bq.b0 = 1.0 / a0;
  bq.b1 = -2.0 * std::cos(w0) / a0;
  bq.b2 = 1.0 / a0;
  bq.a1 = -2.0 * std::cos(w0) / a0;
  bq.a2 = (1.0 - alpha) / a0;
  return bq;
}

// Quartile with linear interpolation on the sorted data (type-7).
double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  double h = p * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

Signal notch_filter(const Signal& signal, double f0, double fs) {
  if (!(f0 > 0.0 && f0 < fs / 2.0))
    throw std::invalid_argument("notch frequency out of (0, fs/2)");
  if (signal.size() < 64) throw std::invalid_argument("signal too short for notch");

  // Single-pass bandwidth chosen so the forward-backward cascade has a
  // 2 Hz -3 dB width: per-pass |H| at +-1 Hz must be 2^(-1/4).
  const double kCascadeBw = 2.0;
  const double per_pass_bw = kCascadeBw * std::sqrt(std::sqrt(2.0) - 1.0);
  Biquad bq = design_notch(f0, fs, per_pass_bw);

  // The forward-backward cascade |H(e^{jw})|^2 is applied on the circular
  // spectrum of the whole signal. A time-domain sweep (or padded spectral
  // processing) leaks narrow-band ring-down from the boundaries into the
  // body; the exact-length DFT keeps periodic components on-bin so the
  // notch band is removed cleanly, and the response stays zero-phase.
  const std::size_t n = signal.size();
  std::vector<std::complex<double>> spec(n);
  for (std::size_t i = 0; i < n; ++i) spec[i] = {signal[i], 0.0};
  fft_any(spec);
  for (std::size_t k = 0; k < n; ++k) {
    double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    std::complex<double> z(std::cos(-w), std::sin(-w));
    std::complex<double> num = bq.b0 + z * (bq.b1 + z * bq.b2);
    std::complex<double> den = 1.0 + z * (bq.a1 + z * bq.a2);
    spec[k] *= std::norm(num / den);
  }
  fft_any(spec, true);

  Signal out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
  return out;
}

Signal clip_and_normalize(const Signal& signal) {
  if (signal.empty()) throw std::invalid_argument("empty signal");
  double q = percentile(signal, 0.75) - percentile(signal, 0.25);
  if (q < 1e-12) return Signal(signal.size(), 0.0);
  const double thresh = 8.0 * q;
  Signal out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    double v = std::fabs(signal[i]) > thresh ? 0.0 : signal[i];
    out[i] = v / thresh;
  }
  return out;
}

PsgRecord preprocess_record(const PsgRecord& record) {
  record.validate();
  PsgRecord out;
  out.id = record.id;
  out.fs = record.fs;
  for (int c = 0; c < kNumChannels; ++c) {
    Channel ch = static_cast<Channel>(c);
    Signal s = notch_filter(record.channels[c], 60.0, record.fs);
    s = notch_filter(s, 80.0, record.fs);
    if (channel_is_clipped(ch)) s = clip_and_normalize(s);
    out.channels[c] = std::move(s);
  }
  return out;
}

std::vector<double> triangular_taper(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t k = 0; k < len; ++k) {
    double u = 2.0 * static_cast<double>(k) / static_cast<double>(len - 1) - 1.0;
    w[k] = 1.0 - std::fabs(u);
  }
  return w;
}

WindowedChannel segment(const Signal& signal, Channel source) {
  if (signal.size() < kWindowLen) throw std::invalid_argument("record too short");
  WindowedChannel wc;
  wc.source = source;
  wc.taper = triangular_taper(kWindowLen);
  const std::size_t m = signal.size() / kWindowLen;
  wc.windows.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& w = wc.windows[i];
    w.resize(kWindowLen);
    for (std::size_t k = 0; k < kWindowLen; ++k)
      w[k] = signal[i * kWindowLen + k] * wc.taper[k];
  }
  return wc;
}

WindowLabels window_labels(const AnnotationTrack& track) {
  if (track.labels.size() < kWindowLen)
    throw std::invalid_argument("annotation track too short");
  WindowLabels out;
  const std::size_t m = track.labels.size() / kWindowLen;
  out.labels.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::array<std::size_t, 3> count{};  // index 0 -> label -1, 1 -> 0, 2 -> +1
    for (std::size_t k = 0; k < kWindowLen; ++k)
      ++count[static_cast<std::size_t>(track.labels[i * kWindowLen + k] + 1)];
    std::size_t best = std::max({count[0], count[1], count[2]});
    std::int8_t label;
    if (count[2] == best) label = 1;        // tie priority 1 > -1 > 0
    else if (count[0] == best) label = -1;
    else label = 0;
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace somnoscat
