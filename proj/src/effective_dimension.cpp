#include "effdim/effective_dimension.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "effdim/error.hpp"

namespace effdim {
namespace {

void require_sample_size(std::int64_t n) {
  if (n < 3) {
    throw Error(ErrorCode::kSampleSizeTooSmall,
                "effective dimension needs n >= 3, got " + std::to_string(n));
  }
}

}  // namespace

double deff(double mi_nats, std::int64_t n) {
  require_sample_size(n);
  if (!(mi_nats >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "mutual information must be >= 0");
  return 2.0 * mi_nats / std::log(static_cast<double>(n));
}

void LocationModel::validate() const {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw Error(ErrorCode::kInvalidArgument, "noise variance must be positive");
  }
  if (!(prior_var >= 0.0) || !std::isfinite(prior_var)) {
    throw Error(ErrorCode::kInvalidArgument, "prior variance must be nonnegative");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
}

double location_mi(const LocationModel& m) {
  m.validate();
  const double snr = static_cast<double>(m.n) * m.prior_var / m.noise_var;
  return 0.5 * static_cast<double>(m.dim) * std::log1p(snr);
}

void RidgeModel::validate() const {
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw Error(ErrorCode::kInvalidArgument, "noise variance must be positive");
  }
  if (!(prior_var >= 0.0) || !std::isfinite(prior_var)) {
    throw Error(ErrorCode::kInvalidArgument, "prior variance must be nonnegative");
  }
  if (design.size() == 0) throw Error(ErrorCode::kDimensionMismatch, "design is empty");
  if (!design.allFinite()) throw Error(ErrorCode::kInvalidArgument, "design has non-finite entries");
}

double RidgeModel::penalty() const {
  if (!(prior_var > 0.0)) throw Error(ErrorCode::kInvalidArgument, "penalty undefined for prior_var = 0");
  return noise_var / prior_var;
}

DesignSpectrum design_spectrum(const Matrix& x) {
  DesignSpectrum out;
  if (x.size() == 0) return out;
  const Eigen::JacobiSVD<Matrix> svd(x);
  const Vector& s = svd.singularValues();
  out.singular_values.assign(s.data(), s.data() + s.size());
  out.singular_values_sq.resize(out.singular_values.size());
  const double top_sq = s.size() > 0 ? s(0) * s(0) : 0.0;
  for (std::size_t j = 0; j < out.singular_values.size(); ++j) {
    const double sq = out.singular_values[j] * out.singular_values[j];
    if (top_sq > 0.0 && sq > linalg::kRankCutoff * top_sq) {
      out.singular_values_sq[j] = sq;
      ++out.rank;
    } else {
      out.singular_values[j] = 0.0;
      out.singular_values_sq[j] = 0.0;
    }
  }
  return out;
}

RegressionMi regression_mi(const DesignSpectrum& spectrum, double snr) {
  if (!(snr >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "snr must be nonnegative");
  RegressionMi out;
  out.spectrum.eigenvalues.assign(spectrum.singular_values_sq.size(), 0.0);
  // Plain left-to-right sum: the sandwich uses the same order, so 2 * mi_nats
  // equals its middle term bit for bit.
  double sum = 0.0;
  for (int j = 0; j < spectrum.rank; ++j) {
    const double u = snr * spectrum.singular_values_sq[static_cast<std::size_t>(j)];
    if (u > 0.0) {
      out.spectrum.eigenvalues[static_cast<std::size_t>(j)] = u;
      ++out.spectrum.rank;
    }
    sum += std::log1p(u);
  }
  out.mi_nats = 0.5 * sum;
  return out;
}

RegressionMi regression_mi(const RidgeModel& m) {
  m.validate();
  return regression_mi(design_spectrum(m.design), m.snr());
}

double info_effective_rank(std::span<const double> s2, double snr) {
  if (s2.empty()) throw Error(ErrorCode::kEmptySpectrum, "information effective rank of an empty spectrum");
  if (!(s2.front() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "leading squared singular value must be positive");
  if (!(snr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "snr must be positive");
  linalg::CompensatedSum sum;
  for (std::size_t j = 0; j < s2.size(); ++j) {
    if (!(s2[j] > 0.0) || (j > 0 && s2[j] > s2[j - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "spectrum must be positive and nonincreasing");
    }
    sum.add(std::log1p(snr * s2[j]));
  }
  return sum.value() / std::log1p(snr * s2.front());
}

double ridge_df(std::span<const double> s2, double penalty) {
  if (!(penalty > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ridge penalty must be positive");
  linalg::CompensatedSum sum;
  for (double v : s2) {
    if (v < 0.0) throw Error(ErrorCode::kInvalidArgument, "squared singular values must be >= 0");
    sum.add(v / (v + penalty));
  }
  return sum.value();
}

Matrix smoothing_matrix(const Matrix& x, double penalty) {
  if (!(penalty > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ridge penalty must be positive");
  Matrix gram = x.transpose() * x;
  gram.diagonal().array() += penalty;
  const auto llt = linalg::cholesky(gram, "X^T X + penalty I");
  return x * llt.solve(x.transpose());
}

Sandwich mi_df_sandwich(std::span<const double> s2, double snr) {
  if (!(snr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "snr must be positive");
  double lower = 0.0, mid = 0.0, upper = 0.0;
  for (double v : s2) {
    const double u = snr * v;
    lower += u / (1.0 + u);
    mid += std::log1p(u);
    upper += u;
  }
  return {lower, mid, upper};
}

Sandwich mi_df_sandwich(const RidgeModel& m) {
  m.validate();
  if (!(m.prior_var > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sandwich needs prior_var > 0");
  const Eigen::JacobiSVD<Matrix> svd(m.design);
  const Vector s2 = svd.singularValues().cwiseAbs2();
  return mi_df_sandwich(std::span<const double>(s2.data(), static_cast<std::size_t>(s2.size())), m.snr());
}

SequenceMi spectrum_sequence_mi(const SpectrumSequence& s) {
  const double a = s.decay_exponent;
  if (!(a > 0.5)) {
    throw Error(ErrorCode::kDivergentSpectrum, "decay exponent must exceed 1/2 for a summable spectrum");
  }
  if (!(s.truncation_error_budget > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "truncation error budget must be positive");
  }
  if (!(s.snr >= 0.0) || !std::isfinite(s.snr)) throw Error(ErrorCode::kInvalidArgument, "snr must be >= 0");
  SequenceMi out;
  if (s.snr == 0.0) return out;

  const double p = 2.0 * a - 1.0;
  auto tail = [&](double j) { return 0.5 * s.snr * std::pow(j, -p) / p; };
  double j_real = std::ceil(std::pow(s.snr / (2.0 * s.truncation_error_budget * p), 1.0 / p));
  constexpr double kMaxTerms = 4.0e9;
  if (!(j_real <= kMaxTerms)) {
    throw Error(ErrorCode::kInvalidArgument, "truncation budget needs more than 4e9 terms");
  }
  std::int64_t terms = std::max<std::int64_t>(1, static_cast<std::int64_t>(j_real));
  while (tail(static_cast<double>(terms)) > s.truncation_error_budget) ++terms;
  while (terms > 1 && tail(static_cast<double>(terms - 1)) <= s.truncation_error_budget) --terms;

  // Smallest terms first.
  linalg::CompensatedSum sum;
  const double exponent = -2.0 * a;
  for (std::int64_t j = terms; j >= 1; --j) {
    sum.add(std::log1p(s.snr * std::pow(static_cast<double>(j), exponent)));
  }
  out.mi_nats = 0.5 * sum.value();
  out.truncation_bound = tail(static_cast<double>(terms));
  out.terms_used = terms;
  return out;
}

double deff_rank_bound(const DesignSpectrum& spectrum, double snr, std::int64_t n) {
  require_sample_size(n);
  if (spectrum.rank == 0 || snr == 0.0) return 0.0;
  return static_cast<double>(spectrum.rank) * std::log1p(snr * spectrum.singular_values_sq.front()) /
         std::log(static_cast<double>(n));
}

double deff_rank_bound(const RidgeModel& m, std::int64_t n) {
  m.validate();
  return deff_rank_bound(design_spectrum(m.design), m.snr(), n);
}

InfoReport regression_report(const RidgeModel& m, std::int64_t n) {
  m.validate();
  require_sample_size(n);
  const DesignSpectrum spectrum = design_spectrum(m.design);
  const double snr = m.snr();

  InfoReport r;
  r.n = n;
  r.mi_nats = regression_mi(spectrum, snr).mi_nats;
  r.d_eff = deff(r.mi_nats, n);
  r.rank = spectrum.rank;
  r.singular_values = spectrum.singular_values;
  r.rank_bound = deff_rank_bound(spectrum, snr, n);
  if (snr > 0.0) {
    const auto s2 = std::span<const double>(spectrum.singular_values_sq);
    r.df = ridge_df(s2, m.penalty());
    const Sandwich sw = mi_df_sandwich(s2, snr);
    r.sandwich_lower = sw.lower;
    r.sandwich_upper = sw.upper;
    if (spectrum.rank > 0) {
      r.r_info = info_effective_rank(s2.first(static_cast<std::size_t>(spectrum.rank)), snr);
    }
  }
  return r;
}

}  // namespace effdim
