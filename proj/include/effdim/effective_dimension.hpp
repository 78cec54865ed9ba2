#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "effdim/gaussian_channel.hpp"
#include "effdim/linalg.hpp"

namespace effdim {

/// Effective dimension 2 * mi / ln(n). Requires n >= 3 and mi >= 0.
double deff(double mi_nats, std::int64_t n);

/// d-dimensional Gaussian location model with N(0, prior_var I) prior and n
/// iid N(theta, noise_var I) observations.
struct LocationModel {
  int dim = 1;
  double prior_var = 1.0;
  double noise_var = 1.0;
  std::int64_t n = 1;

  void validate() const;
};

/// (d/2) ln(1 + n tau^2 / sigma^2).
double location_mi(const LocationModel& m);

/// Fixed-design linear model Y ~ N(X beta, noise_var I), beta ~ N(0, prior_var I).
struct RidgeModel {
  Matrix design;
  double noise_var = 1.0;
  double prior_var = 1.0;

  void validate() const;
  double snr() const { return prior_var / noise_var; }
  /// Ridge penalty sigma^2 / tau^2; throws when prior_var == 0.
  double penalty() const;
};

/// Singular values of a design, nonincreasing, with the numerical rank.
struct DesignSpectrum {
  std::vector<double> singular_values;
  std::vector<double> singular_values_sq;
  int rank = 0;
};

DesignSpectrum design_spectrum(const Matrix& x);

struct RegressionMi {
  double mi_nats = 0.0;
  ChannelSpectrum spectrum;  // eigenvalues are (tau^2/sigma^2) s_j^2
};

/// 1/2 sum_j ln(1 + (tau^2/sigma^2) s_j^2) from the singular values of X.
RegressionMi regression_mi(const RidgeModel& m);
RegressionMi regression_mi(const DesignSpectrum& spectrum, double snr);

/// sum_j ln(1 + snr s_j^2) / ln(1 + snr s_1^2). The spectrum must be
/// nonempty, nonincreasing and have s_1^2 > 0.
double info_effective_rank(std::span<const double> singular_values_sq, double snr);

/// sum_j s_j^2 / (s_j^2 + penalty).
double ridge_df(std::span<const double> singular_values_sq, double penalty);

/// Smoothing matrix X (X^T X + penalty I)^{-1} X^T. Cross-check path only.
Matrix smoothing_matrix(const Matrix& x, double penalty);

struct Sandwich {
  double lower = 0.0;  // df(alpha)
  double mid = 0.0;    // 2 I(beta; Y)
  double upper = 0.0;  // (tau^2/sigma^2) tr(X^T X)
};

/// Ordering lower <= mid <= upper holds in floating point because the three
/// sums run over the same per-mode u_j = snr * s_j^2 in the same order.
Sandwich mi_df_sandwich(std::span<const double> singular_values_sq, double snr);
Sandwich mi_df_sandwich(const RidgeModel& m);

/// Spectrum s_j^2 = j^{-2a}, j = 1, 2, ...
struct SpectrumSequence {
  double decay_exponent = 1.0;
  double snr = 1.0;
  double truncation_error_budget = 1e-6;
};

struct SequenceMi {
  double mi_nats = 0.0;
  double truncation_bound = 0.0;
  std::int64_t terms_used = 1;
};

/// Partial sum 1/2 sum_{j<=J} ln(1 + snr j^{-2a}) with J the smallest count
/// whose certified tail bound snr J^{1-2a} / (2 (2a-1)) fits the budget.
SequenceMi spectrum_sequence_mi(const SpectrumSequence& s);

/// Upper bound r ln(1 + snr s_1^2) / ln(n) on the effective dimension.
double deff_rank_bound(const RidgeModel& m, std::int64_t n);
double deff_rank_bound(const DesignSpectrum& spectrum, double snr, std::int64_t n);

struct InfoReport {
  double mi_nats = 0.0;
  double d_eff = 0.0;
  std::int64_t n = 0;
  std::optional<double> df;
  std::optional<double> r_info;
  double sandwich_lower = 0.0;
  double sandwich_upper = 0.0;
  int rank = 0;
  double rank_bound = 0.0;
  std::vector<double> singular_values;
};

/// All regression functionals from a single SVD of the design.
InfoReport regression_report(const RidgeModel& m, std::int64_t n);

}  // namespace effdim
