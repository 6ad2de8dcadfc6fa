#include "somnoscat/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace somnoscat {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    for (auto& v : a) v /= static_cast<double>(n);
  }
}

void fft_any(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0) throw std::invalid_argument("fft of empty vector");
  if ((n & (n - 1)) == 0) {
    fft(a, inverse);
    return;
  }

  // Bluestein: X_k = c_k * sum_j (x_j c_j) conj(c_{k-j}), c_k = e^{-i pi k^2 / n}
  const double sgn = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    double ang = sgn * M_PI * static_cast<double>((k * k) % (2 * n)) /
                 static_cast<double>(n);
    c[k] = {std::cos(ang), std::sin(ang)};
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<std::complex<double>> u(m, {0.0, 0.0}), v(m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) u[k] = a[k] * c[k];
  v[0] = std::conj(c[0]);
  for (std::size_t k = 1; k < n; ++k) v[k] = v[m - k] = std::conj(c[k]);
  fft(u);
  fft(v);
  for (std::size_t k = 0; k < m; ++k) u[k] *= v[k];
  fft(u, true);
  for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * c[k];
  if (inverse)
    for (auto& z : a) z /= static_cast<double>(n);
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& x,
                                           std::size_t n_fft) {
  std::vector<std::complex<double>> a(n_fft, {0.0, 0.0});
  const std::size_t m = std::min(x.size(), n_fft);
  for (std::size_t i = 0; i < m; ++i) a[i] = {x[i], 0.0};
  fft(a);
  return a;
}

}  // namespace somnoscat
