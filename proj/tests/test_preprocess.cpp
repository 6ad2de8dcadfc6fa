#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "somnoscat/preprocess.hpp"
#include "somnoscat/synthetic.hpp"

using namespace somnoscat;

namespace {

double rms(const Signal& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

Signal sinusoid(double freq, double fs, std::size_t n, double amp = 1.0) {
  Signal x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * freq *
                          static_cast<double>(i) / fs);
  return x;
}

// independent sorted-quartile IQR (linear interpolation between order stats)
double iqr_oracle(Signal x) {
  std::sort(x.begin(), x.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(x.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= x.size()) return x.back();
    return x[lo] * (1 - frac) + x[lo + 1] * frac;
  };
  return quantile(0.75) - quantile(0.25);
}

}  // namespace

TEST_CASE("notch removes a 60 Hz tone by at least 40 dB") {
  Signal x = sinusoid(60.0, kSampleRate, 2000);
  Signal y = notch_filter(x, 60.0, kSampleRate);
  CHECK(y.size() == x.size());
  CHECK(rms(y) <= 0.01 * rms(x));
}

TEST_CASE("notch maps zero to zero") {
  Signal x(2000, 0.0);
  Signal y = notch_filter(x, 60.0, kSampleRate);
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("notch passband ripple under 0.5 dB") {
  for (double f : {10.0, 30.0, 55.0, 66.0}) {
    Signal x = sinusoid(f, kSampleRate, 4000);
    Signal y = notch_filter(x, 60.0, kSampleRate);
    double db = 20.0 * std::log10(rms(y) / rms(x));
    CHECK(std::abs(db) <= 0.5);
  }
}

TEST_CASE("notch rejects bad inputs") {
  Signal x(2000, 1.0);
  CHECK_THROWS(notch_filter(x, 0.0, kSampleRate));
  CHECK_THROWS(notch_filter(x, 100.0, kSampleRate));
  Signal tiny(10, 1.0);
  CHECK_THROWS(notch_filter(tiny, 60.0, kSampleRate));
}

TEST_CASE("notch is linear") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0, 1);
  Signal x(1500), y(1500), z(1500);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = d(rng);
    y[i] = d(rng);
    z[i] = 2.5 * x[i] - 0.75 * y[i];
  }
  Signal fx = notch_filter(x, 60.0, kSampleRate);
  Signal fy = notch_filter(y, 60.0, kSampleRate);
  Signal fz = notch_filter(z, 60.0, kSampleRate);
  double err = 0, scale = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    err = std::max(err, std::abs(fz[i] - (2.5 * fx[i] - 0.75 * fy[i])));
    scale = std::max(scale, std::abs(fz[i]));
  }
  CHECK(err <= 1e-9 * std::max(scale, 1.0));
}

TEST_CASE("clip_and_normalize divides by 8 IQR when nothing clips") {
  Signal x(200);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2) ? 1.0 : -1.0;
  double q = iqr_oracle(x);
  REQUIRE(q > 0);
  Signal y = clip_and_normalize(x);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(y[i] == doctest::Approx(x[i] / (8.0 * q)).epsilon(1e-12));
}

TEST_CASE("clip_and_normalize zeroes outliers and constants") {
  Signal x(1000);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d(0, 1);
  for (double& v : x) v = d(rng);
  double q = iqr_oracle(x);
  x[500] = 20.0 * q;  // way past the 8 IQR fence
  Signal y = clip_and_normalize(x);
  CHECK(y[500] == 0.0);
  double m = 0;
  for (double v : y) m = std::max(m, std::abs(v));
  CHECK(m <= 1.0);

  Signal c(100, 3.14);
  Signal yc = clip_and_normalize(c);
  for (double v : yc) CHECK(v == 0.0);
}

TEST_CASE("preprocess_record spares SaO2 and ECG from clipping") {
  auto [rec, ann] = generate_synthetic(13, 20.0, {});
  rec.channel(Channel::SaO2)[100] = 500.0;  // huge spike
  {
    Signal& airflow = rec.channel(Channel::Airflow);
    double q = iqr_oracle(airflow);
    airflow[200] = 20.0 * q;
  }
  PsgRecord out = preprocess_record(rec);
  // the SaO2 spike survives (notch barely dents an isolated sample)
  double sao2_peak = 0;
  for (double v : out.channel(Channel::SaO2)) sao2_peak = std::max(sao2_peak, v);
  CHECK(sao2_peak > 100.0);
  for (int c = 0; c < kNumChannels; ++c) {
    if (!channel_is_clipped(channel_from_index(c))) continue;
    for (double v : out.channels[c]) CHECK(std::abs(v) <= 1.0);
  }
}

TEST_CASE("segment window arithmetic") {
  Signal x(420000, 0.0);
  CHECK(segment(x).count() == 420);
  Signal y(1500, 0.0);
  CHECK(segment(y).count() == 1);
  Signal z(999, 0.0);
  CHECK_THROWS(segment(z));
}

TEST_CASE("segmenting a constant yields the taper itself") {
  Signal x(1000, 1.0);
  WindowedChannel wc = segment(x);
  REQUIRE(wc.count() == 1);
  std::vector<double> taper = triangular_taper(kWindowLen);
  CHECK(wc.windows[0] == taper);
  CHECK(taper.front() == 0.0);
  CHECK(taper.back() == 0.0);
  // even length: the two center weights sit 1/(L-1) below the peak of 1
  CHECK(*std::max_element(taper.begin(), taper.end()) ==
        doctest::Approx(1.0 - 1.0 / 999.0));
  for (std::size_t k = 0; k < taper.size(); ++k)
    CHECK(taper[k] == doctest::Approx(taper[taper.size() - 1 - k]));
}

TEST_CASE("segment is consistent with blockwise windows") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> d(0, 1);
  Signal a(1000), b(1000);
  for (double& v : a) v = d(rng);
  for (double& v : b) v = d(rng);
  Signal both = a;
  both.insert(both.end(), b.begin(), b.end());
  WindowedChannel w = segment(both);
  REQUIRE(w.count() == 2);
  CHECK(w.windows[0] == segment(a).windows[0]);
  CHECK(w.windows[1] == segment(b).windows[0]);
}

TEST_CASE("window_labels majority and tie rules") {
  AnnotationTrack t;
  t.labels.assign(1000, 1);
  CHECK(window_labels(t).labels == std::vector<std::int8_t>{1});

  t.labels.assign(600, -1);
  t.labels.insert(t.labels.end(), 400, 0);
  CHECK(window_labels(t).labels == std::vector<std::int8_t>{-1});

  t.labels.assign(500, 1);
  t.labels.insert(t.labels.end(), 500, 0);
  CHECK(window_labels(t).labels == std::vector<std::int8_t>{1});

  t.labels.assign(500, -1);
  t.labels.insert(t.labels.end(), 500, 0);
  CHECK(window_labels(t).labels == std::vector<std::int8_t>{-1});
}

TEST_CASE("window_labels is permutation invariant inside a window") {
  std::mt19937_64 rng(17);
  AnnotationTrack t;
  for (int i = 0; i < 1000; ++i)
    t.labels.push_back(static_cast<std::int8_t>(static_cast<int>(rng() % 3) - 1));
  auto before = window_labels(t).labels;
  std::shuffle(t.labels.begin(), t.labels.end(), rng);
  CHECK(window_labels(t).labels == before);
}
