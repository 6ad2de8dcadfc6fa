#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "somnoscat/spectral.hpp"

using namespace somnoscat;

namespace {

std::vector<double> ar2_process(std::uint64_t seed, std::size_t n) {
  // x_n = 1.5 x_{n-1} - 0.7 x_{n-2} + v_n
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> x(n + 200, 0.0);
  for (std::size_t i = 2; i < x.size(); ++i)
    x[i] = 1.5 * x[i - 1] - 0.7 * x[i - 2] + d(rng);
  return {x.begin() + 200, x.end()};  // drop the transient
}

std::vector<double> tone(double freq, double fs, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs);
  return x;
}

// reflection coefficients recovered from AR coefficients by the backward
// Levinson recursion; independent of the lattice implementation
std::vector<double> reflection_from_ar(std::vector<double> a) {
  std::vector<double> ks;
  for (int p = static_cast<int>(a.size()); p >= 1; --p) {
    double k = a[static_cast<std::size_t>(p - 1)];
    ks.push_back(k);
    if (p == 1) break;
    std::vector<double> prev(static_cast<std::size_t>(p - 1));
    double denom = 1.0 - k * k;
    for (int i = 0; i < p - 1; ++i)
      prev[static_cast<std::size_t>(i)] =
          (a[static_cast<std::size_t>(i)] -
           k * a[static_cast<std::size_t>(p - 2 - i)]) / denom;
    a = prev;
  }
  return ks;
}

}  // namespace

TEST_CASE("burg degenerate and error cases") {
  std::vector<double> zero(100, 0.0);
  ArModel m = burg(zero, 10);
  CHECK(m.noise_var == 0.0);
  for (double a : m.coeffs) CHECK(a == 0.0);

  std::vector<double> tiny(5, 1.0);
  CHECK_THROWS(burg(tiny, 10));
}

TEST_CASE("burg recovers AR(2) coefficients") {
  std::vector<double> x = ar2_process(42, 4000);
  ArModel m = burg(x, 2);
  CHECK(m.coeffs[0] == doctest::Approx(-1.5).epsilon(0.05 / 1.5));
  CHECK(m.coeffs[1] == doctest::Approx(0.7).epsilon(0.05 / 0.7));
  CHECK(m.noise_var > 0);
}

TEST_CASE("burg on white noise gives small coefficients") {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> x(4000);
  for (double& v : x) v = d(rng);
  ArModel m = burg(x, 10);
  for (double a : m.coeffs) CHECK(std::abs(a) <= 0.1);
}

TEST_CASE("burg reflection coefficients stay inside the unit interval") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> d(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(500);
    for (double& v : x) v = d(rng);
    ArModel m = burg(x, 12);
    for (double k : reflection_from_ar(m.coeffs))
      CHECK(std::abs(k) < 1.0);
  }
}

TEST_CASE("ar_psd analytic values") {
  ArModel white{0, {}, 1.0};
  PsdEstimate psd = ar_psd(white, 200.0, 512);
  REQUIRE(psd.values.size() == 512);
  CHECK(psd.freqs.front() == 0.0);
  CHECK(psd.freqs.back() == doctest::Approx(100.0));
  for (std::size_t i = 1; i + 1 < psd.values.size(); ++i)
    CHECK(psd.values[i] == doctest::Approx(0.01).epsilon(1e-9));

  ArModel silent{2, {0.5, 0.1}, 0.0};
  for (double v : ar_psd(silent, 200.0, 128).values) CHECK(v == 0.0);
}

TEST_CASE("ar_psd peak matches the AR(2) pole angle") {
  std::vector<double> x = ar2_process(9, 4000);
  ArModel m = burg(x, 2);
  PsdEstimate psd = ar_psd(m, 200.0, 2048);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < psd.values.size(); ++i)
    if (psd.values[i] > psd.values[peak]) peak = i;
  // analytic AR(2) spectral peak: cos w = 1.5 (1 + 0.7) / (4 * 0.7)
  CHECK(psd.freqs[peak] == doctest::Approx(13.5531956177).epsilon(0.5 / 13.55));
}

TEST_CASE("band_power basics") {
  // literally flat density 0.01 over [0, 100] integrates to 1
  PsdEstimate psd;
  for (int i = 0; i < 512; ++i) {
    psd.freqs.push_back(100.0 * i / 511.0);
    psd.values.push_back(0.01);
  }
  CHECK(band_power(psd, 0.0, 100.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS(band_power(psd, 50.0, 10.0));

  PsdEstimate zero = psd;
  for (double& v : zero.values) v = 0.0;
  CHECK(band_power(zero, 1.0, 30.0) == 0.0);
}

TEST_CASE("band_power concentrates around a 1 Hz tone") {
  std::vector<double> x = tone(1.0, 200.0, 4000);
  ArModel m = burg(x, 30);
  PsdEstimate psd = ar_psd(m, 200.0, 512);
  CHECK(band_power(psd, 0.75, 1.2) > 10.0 * band_power(psd, 1.2, 1.6));
}

TEST_CASE("band_power Parseval sanity on white noise") {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> x(8000);
  for (double& v : x) v = d(rng);
  ArModel m = burg(x, 30);
  PsdEstimate psd = ar_psd(m, 200.0, 512);
  Moments mo = moments(x);
  double var = mo.std_dev * mo.std_dev;
  CHECK(band_power(psd, 0.0, 100.0) ==
        doctest::Approx(var).epsilon(0.15));
}

TEST_CASE("moments analytic cases") {
  std::vector<double> ones{1, 1, 1, 1};
  Moments m = moments(ones);
  CHECK(m.mean == 1.0);
  CHECK(m.std_dev == 0.0);
  CHECK(m.rms == 1.0);
  CHECK(m.skewness == 0.0);
  CHECK(m.kurtosis == 0.0);

  std::vector<double> alt{-1, 1, -1, 1};
  m = moments(alt);
  CHECK(m.mean == 0.0);
  CHECK(m.std_dev == 1.0);
  CHECK(m.rms == 1.0);
  CHECK(m.skewness == 0.0);
  CHECK(m.kurtosis == 1.0);

  std::vector<double> tiny{1, 2, 3};
  CHECK_THROWS(moments(tiny));
}

TEST_CASE("moments of seeded gaussian noise") {
  std::mt19937_64 rng(321);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> x(100000);
  for (double& v : x) v = d(rng);
  CHECK(moments(x).kurtosis == doctest::Approx(3.0).epsilon(0.1 / 3.0));
}

TEST_CASE("diffs forward differences") {
  std::vector<double> ramp{0, 1, 2, 3, 4};
  auto [d1, d2] = diffs(ramp);
  CHECK(d1 == std::vector<double>{1, 1, 1, 1});
  CHECK(d2 == std::vector<double>{0, 0, 0});

  std::vector<double> sq{0, 1, 4, 9};
  auto [e1, e2] = diffs(sq);
  CHECK(e1 == std::vector<double>{1, 3, 5});
  CHECK(e2 == std::vector<double>{2, 2});

  std::vector<double> c(10, 7.0);
  auto [f1, f2] = diffs(c);
  for (double v : f1) CHECK(v == 0.0);
  for (double v : f2) CHECK(v == 0.0);

  std::vector<double> tiny{1, 2};
  CHECK_THROWS(diffs(tiny));
}

TEST_CASE("mean_frequency") {
  ArModel white{0, {}, 1.0};
  PsdEstimate psd = ar_psd(white, 200.0, 512);
  CHECK(mean_frequency(psd) == doctest::Approx(50.0).epsilon(0.1 / 50.0));

  std::vector<double> x = tone(5.0, 200.0, 4000);
  PsdEstimate tpsd = ar_psd(burg(x, 30), 200.0, 512);
  CHECK(mean_frequency(tpsd) == doctest::Approx(5.0).epsilon(0.5 / 5.0));
  CHECK(mean_frequency(tpsd) >= 0.0);
  CHECK(mean_frequency(tpsd) <= 100.0);

  PsdEstimate zero = psd;
  for (double& v : zero.values) v = 0.0;
  CHECK(mean_frequency(zero) == 0.0);
}

TEST_CASE("incomplete beta against frozen reference values") {
  CHECK(incomplete_beta(0.5, 0.5, 0.25) ==
        doctest::Approx(0.33333333333333337).epsilon(1e-10));
  CHECK(incomplete_beta(2.0, 3.0, 0.6) ==
        doctest::Approx(0.82079999999999997).epsilon(1e-10));
  CHECK(incomplete_beta(5.5, 1.25, 0.9) ==
        doctest::Approx(0.66562588926411737).epsilon(1e-10));
  CHECK(incomplete_beta(1.5, 4.5, 0.05) ==
        doctest::Approx(0.078055536426969177).epsilon(1e-10));
  CHECK(incomplete_beta(2.0, 2.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 2.0, 1.0) == 1.0);
}

TEST_CASE("pearson exact and frozen cases") {
  std::vector<double> x{1, 2, 3, 4, 5};
  Correlation self = pearson(x, x);
  CHECK(self.r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(self.p == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<double> nx{-1, -2, -3, -4, -5};
  Correlation anti = pearson(x, nx);
  CHECK(anti.r == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(anti.p == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<double> y{2, 1, 4, 3, 6};
  Correlation c = pearson(x, y);
  CHECK(c.r == doctest::Approx(0.82199493652678646).epsilon(1e-10));
  CHECK(c.p == doctest::Approx(0.087706647008065533).epsilon(1e-8));

  std::vector<double> k(5, 3.0);
  Correlation flat = pearson(x, k);
  CHECK(flat.r == 0.0);
  CHECK(flat.p == 1.0);

  std::vector<double> wrong{1, 2};
  CHECK_THROWS(pearson(x, wrong));
}

TEST_CASE("pearson affine invariance and p monotonicity") {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> x(50), y(50), y2(50);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = d(rng);
    y[i] = 0.5 * x[i] + d(rng);
    y2[i] = 3.0 * y[i] + 10.0;
  }
  Correlation a = pearson(x, y);
  Correlation b = pearson(x, y2);
  CHECK(a.r == doctest::Approx(b.r).epsilon(1e-12));

  // stronger |r| at the same n gives smaller p
  std::vector<double> y_strong(50);
  for (std::size_t i = 0; i < x.size(); ++i) y_strong[i] = 2.0 * x[i] + 0.1 * y[i];
  Correlation s = pearson(x, y_strong);
  REQUIRE(std::abs(s.r) > std::abs(a.r));
  CHECK(s.p < a.p);
}

TEST_CASE("svd_features analytic cases") {
  std::vector<double> z(10, 0.0);
  SvdFeatures f = svd_features(z, z, z);
  CHECK(f.sigma[0] == 0.0);
  CHECK(f.ratio == 0.0);
  CHECK(f.arith_mean == 0.0);
  CHECK(f.std_dev == 0.0);

  // orthonormal rows scaled by 3, 2, 1
  std::size_t n = 4;
  std::vector<double> r0{3, 0, 0, 0}, r1{0, 2, 0, 0}, r2{0, 0, 1, 0};
  (void)n;
  f = svd_features(r0, r1, r2);
  CHECK(f.sigma[0] == doctest::Approx(3.0));
  CHECK(f.sigma[1] == doctest::Approx(2.0));
  CHECK(f.sigma[2] == doctest::Approx(1.0));
  CHECK(f.arith_mean == doctest::Approx(2.0));
  CHECK(f.geom_mean == doctest::Approx(std::cbrt(6.0)));
  CHECK(f.std_dev == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(f.ratio == doctest::Approx(3.0));
}

TEST_CASE("svd_features Frobenius identity and ordering") {
  std::mt19937_64 rng(89);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> r0(1000), r1(1000), r2(1000);
  double frob2 = 0;
  for (std::size_t i = 0; i < r0.size(); ++i) {
    r0[i] = d(rng);
    r1[i] = d(rng);
    r2[i] = d(rng);
    frob2 += r0[i] * r0[i] + r1[i] * r1[i] + r2[i] * r2[i];
  }
  SvdFeatures f = svd_features(r0, r1, r2);
  CHECK(f.sigma[0] >= f.sigma[1]);
  CHECK(f.sigma[1] >= f.sigma[2]);
  CHECK(f.sigma[2] >= 0.0);
  double sum2 = f.sigma[0] * f.sigma[0] + f.sigma[1] * f.sigma[1] +
                f.sigma[2] * f.sigma[2];
  CHECK(sum2 == doctest::Approx(frob2).epsilon(1e-9));
}
