#pragma once

#include <array>
#include <span>
#include <vector>

namespace somnoscat {

/// AR model in the convention x_n = -sum_k a_k x_{n-k} + v_n.
struct ArModel {
  int order = 0;
  std::vector<double> coeffs;     // a_1 .. a_p
  double noise_var = 0.0;         // final forward/backward prediction-error power
};

struct PsdEstimate {
  std::vector<double> freqs;   // uniform grid over [0, fs/2], Hz
  std::vector<double> values;  // one-sided power density, >= 0
};

struct SvdFeatures {
  std::array<double, 3> sigma{};  // descending
  double arith_mean = 0;
  double geom_mean = 0;
  double std_dev = 0;   // population convention
  double ratio = 0;     // sigma1 / max(sigma3, 1e-12); 0 when sigma1 == 0
};

struct Moments {
  double mean = 0, std_dev = 0, rms = 0, skewness = 0, kurtosis = 0;
};

/// Burg lattice estimator; reflection coefficients stay inside (-1, 1).
/// Zero-energy input yields the degenerate all-zero model.
ArModel burg(std::span<const double> signal, int order);

PsdEstimate ar_psd(const ArModel& model, double fs, std::size_t grid_size = 512);

/// Trapezoidal area under the PSD over [f1, f2]; band edges interpolated.
double band_power(const PsdEstimate& psd, double f1, double f2);

/// Population-convention moments; skewness/kurtosis defined 0 when std < 1e-12.
Moments moments(std::span<const double> signal);

/// First and second forward differences (lengths N-1 and N-2).
std::pair<std::vector<double>, std::vector<double>> diffs(
    std::span<const double> signal);

/// Spectral centroid; 0 when total power < 1e-15.
double mean_frequency(const PsdEstimate& psd);

/// Sample correlation plus the two-tailed p-value of the no-relationship
/// t-test (exact Student-t CDF). Constant input yields r = 0, p = 1.
struct Correlation {
  double r = 0;
  double p = 1;
};
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Singular values of a 3 x N matrix (rows given separately) with summary stats.
SvdFeatures svd_features(std::span<const double> row0, std::span<const double> row1,
                         std::span<const double> row2);

/// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

}  // namespace somnoscat
