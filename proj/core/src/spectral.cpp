#include "somnoscat/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace somnoscat {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

ArModel burg(std::span<const double> signal, int order) {
  if (order < 1) throw std::invalid_argument("AR order must be >= 1");
  const std::size_t n = signal.size();
  if (n <= 2 * static_cast<std::size_t>(order))
    throw std::invalid_argument("signal too short for AR order");

  double energy = 0;
  for (double v : signal) energy += v * v;
  ArModel model;
  model.order = order;
  model.coeffs.assign(static_cast<std::size_t>(order), 0.0);
  if (energy / static_cast<double>(n) < 1e-300) {
    model.noise_var = 0.0;
    return model;
  }

  std::vector<double> f(signal.begin(), signal.end());
  std::vector<double> b(signal.begin(), signal.end());
  std::vector<double> a;  // growing coefficient vector
  double err = energy / static_cast<double>(n);

  for (int m = 1; m <= order; ++m) {
    double num = 0, den = 0;
    for (std::size_t i = static_cast<std::size_t>(m); i < n; ++i) {
      num += f[i] * b[i - 1];
      den += f[i] * f[i] + b[i - 1] * b[i - 1];
    }
    double k = den > 0 ? -2.0 * num / den : 0.0;

    std::vector<double> a_new(static_cast<std::size_t>(m));
    for (int i = 0; i < m - 1; ++i)
      a_new[static_cast<std::size_t>(i)] =
          a[static_cast<std::size_t>(i)] +
          k * a[static_cast<std::size_t>(m - 2 - i)];
    a_new[static_cast<std::size_t>(m - 1)] = k;
    a = std::move(a_new);

    // lattice update, backward shifted by one
    for (std::size_t i = n - 1; i >= static_cast<std::size_t>(m); --i) {
      double fi = f[i], bp = b[i - 1];
      f[i] = fi + k * bp;
      b[i] = bp + k * fi;
    }
    err *= (1.0 - k * k);
  }

  model.coeffs = a;
  model.noise_var = std::max(err, 0.0);
  return model;
}

PsdEstimate ar_psd(const ArModel& model, double fs, std::size_t grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid too small");
  PsdEstimate psd;
  psd.freqs.resize(grid_size);
  psd.values.resize(grid_size);
  const double half = fs / 2.0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    double f = half * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    psd.freqs[i] = f;
    std::complex<double> denom(1.0, 0.0);
    for (int k = 1; k <= model.order; ++k) {
      double w = -kTwoPi * f * static_cast<double>(k) / fs;
      denom += model.coeffs[static_cast<std::size_t>(k - 1)] *
               std::complex<double>(std::cos(w), std::sin(w));
    }
    double mag2 = std::norm(denom);
    double p = mag2 > 0 ? model.noise_var / (fs * mag2) : 0.0;
    if (i != 0 && i != grid_size - 1) p *= 2.0;  // one-sided
    psd.values[i] = p;
  }
  return psd;
}

namespace {

double psd_at(const PsdEstimate& psd, double f) {
  const auto& fr = psd.freqs;
  if (f <= fr.front()) return psd.values.front();
  if (f >= fr.back()) return psd.values.back();
  auto it = std::upper_bound(fr.begin(), fr.end(), f);
  std::size_t hi = static_cast<std::size_t>(it - fr.begin());
  std::size_t lo = hi - 1;
  double t = (f - fr[lo]) / (fr[hi] - fr[lo]);
  return psd.values[lo] + t * (psd.values[hi] - psd.values[lo]);
}

}  // namespace

double band_power(const PsdEstimate& psd, double f1, double f2) {
  if (!(f1 >= 0.0 && f1 < f2 && f2 <= psd.freqs.back() + 1e-9))
    throw std::invalid_argument("invalid band");
  // knots: f1, interior grid points, f2
  double total = 0;
  double prev_f = f1, prev_p = psd_at(psd, f1);
  for (std::size_t i = 0; i < psd.freqs.size(); ++i) {
    double f = psd.freqs[i];
    if (f <= f1) continue;
    if (f >= f2) break;
    total += 0.5 * (prev_p + psd.values[i]) * (f - prev_f);
    prev_f = f;
    prev_p = psd.values[i];
  }
  total += 0.5 * (prev_p + psd_at(psd, f2)) * (f2 - prev_f);
  return total;
}

Moments moments(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 4) throw std::invalid_argument("need at least 4 samples");
  Moments m;
  double sum = 0, sum_sq = 0;
  for (double v : signal) {
    sum += v;
    sum_sq += v * v;
  }
  m.mean = sum / static_cast<double>(n);
  m.rms = std::sqrt(sum_sq / static_cast<double>(n));
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : signal) {
    double d = v - m.mean;
    double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  m.std_dev = std::sqrt(m2);
  if (m.std_dev < 1e-12) {
    m.std_dev = 0;  // centered residue of a constant input is pure round-off
    m.skewness = 0;
    m.kurtosis = 0;
  } else {
    m.skewness = m3 / (m.std_dev * m.std_dev * m.std_dev);
    m.kurtosis = m4 / (m2 * m2);
  }
  return m;
}

std::pair<std::vector<double>, std::vector<double>> diffs(
    std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 3) throw std::invalid_argument("need at least 3 samples");
  std::vector<double> d1(n - 1), d2(n - 2);
  for (std::size_t i = 0; i + 1 < n; ++i) d1[i] = signal[i + 1] - signal[i];
  for (std::size_t i = 0; i + 2 < n; ++i)
    d2[i] = signal[i + 2] - 2.0 * signal[i + 1] + signal[i];
  return {std::move(d1), std::move(d2)};
}

double mean_frequency(const PsdEstimate& psd) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i + 1 < psd.freqs.size(); ++i) {
    double df = psd.freqs[i + 1] - psd.freqs[i];
    num += 0.5 * (psd.freqs[i] * psd.values[i] +
                  psd.freqs[i + 1] * psd.values[i + 1]) * df;
    den += 0.5 * (psd.values[i] + psd.values[i + 1]) * df;
  }
  if (den < 1e-15) return 0.0;
  return num / den;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  // continued fraction (Lentz), with the symmetry transform for convergence
  auto betacf = [](double a_, double b_, double x_) {
    const int kMaxIter = 300;
    const double eps = 1e-15, fpmin = 1e-300;
    double qab = a_ + b_, qap = a_ + 1.0, qam = a_ - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x_ / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
      int m2 = 2 * m;
      double aa = m * (b_ - m) * x_ / ((qam + m2) * (a_ + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < fpmin) d = fpmin;
      c = 1.0 + aa / c;
      if (std::fabs(c) < fpmin) c = fpmin;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a_ + m) * (qab + m) * x_ / ((a_ + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < fpmin) d = fpmin;
      c = 1.0 + aa / c;
      if (std::fabs(c) < fpmin) c = fpmin;
      d = 1.0 / d;
      double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
  };

  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("need at least 3 samples");

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx < 1e-24 || syy < 1e-24) return {0.0, 1.0};

  Correlation c;
  c.r = sxy / std::sqrt(sxx * syy);
  c.r = std::clamp(c.r, -1.0, 1.0);
  double nu = static_cast<double>(n - 2);
  double r2 = c.r * c.r;
  if (1.0 - r2 < 1e-15) {
    c.p = 0.0;
    return c;
  }
  double t2 = r2 * nu / (1.0 - r2);
  // two-tailed p = I_{nu/(nu+t^2)}(nu/2, 1/2)
  c.p = incomplete_beta(nu / 2.0, 0.5, nu / (nu + t2));
  return c;
}

SvdFeatures svd_features(std::span<const double> row0, std::span<const double> row1,
                         std::span<const double> row2) {
  const std::size_t n = row0.size();
  if (row1.size() != n || row2.size() != n)
    throw std::invalid_argument("row length mismatch");
  if (n < 3) throw std::invalid_argument("need N >= 3");

  Eigen::MatrixXd x(3, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    x(0, static_cast<Eigen::Index>(i)) = row0[i];
    x(1, static_cast<Eigen::Index>(i)) = row1[i];
    x(2, static_cast<Eigen::Index>(i)) = row2[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  Eigen::Vector3d s = svd.singularValues();

  SvdFeatures out;
  out.sigma = {s(0), s(1), s(2)};
  out.arith_mean = (s(0) + s(1) + s(2)) / 3.0;
  out.geom_mean = std::cbrt(s(0) * s(1) * s(2));
  double var = 0;
  for (double v : out.sigma) var += (v - out.arith_mean) * (v - out.arith_mean);
  out.std_dev = std::sqrt(var / 3.0);
  out.ratio = out.sigma[0] == 0.0 ? 0.0 : out.sigma[0] / std::max(out.sigma[2], 1e-12);
  return out;
}

}  // namespace somnoscat
