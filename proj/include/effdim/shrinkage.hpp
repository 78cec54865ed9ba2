#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "effdim/linalg.hpp"
#include "effdim/monte_carlo.hpp"

namespace effdim {

/// Verified polynomial tail bound P(lambda >= t) <= c_const * t^{-alpha_exp}
/// for all t >= t0.
struct TailCertificate {
  double c_const = 1.0;
  double alpha_exp = 1.0;
  double t0 = 1.0;

  void validate() const;
};

namespace prior {

struct Fixed {
  double scale = 1.0;  // tau
};

/// lambda^2 ~ Inv-Gamma(dof/2, dof * scale_sq / 2); theta is then Student-t.
struct InverseGammaMixture {
  double dof = 4.0;
  double scale_sq = 1.0;
};

/// lambda = global_scale * |standard Cauchy| (horseshoe local scale).
struct HalfCauchy {
  double global_scale = 1.0;
};

/// Uniform draws from a user table of nonnegative scales.
struct Tabulated {
  std::vector<double> values;
};

}  // namespace prior

/// Mixing law of the local scale lambda in theta | lambda ~ N(0, lambda^2).
class ShrinkagePrior {
 public:
  using Kind = std::variant<prior::Fixed, prior::InverseGammaMixture, prior::HalfCauchy,
                            prior::Tabulated>;

  explicit ShrinkagePrior(Kind kind);

  static ShrinkagePrior fixed(double scale) { return ShrinkagePrior(prior::Fixed{scale}); }
  static ShrinkagePrior student_t(double dof, double scale_sq) {
    return ShrinkagePrior(prior::InverseGammaMixture{dof, scale_sq});
  }
  static ShrinkagePrior half_cauchy(double global_scale) {
    return ShrinkagePrior(prior::HalfCauchy{global_scale});
  }
  static ShrinkagePrior tabulated(std::vector<double> values) {
    return ShrinkagePrior(prior::Tabulated{std::move(values)});
  }

  const Kind& kind() const { return kind_; }
  std::string name() const;
  bool is_degenerate() const { return std::holds_alternative<prior::Fixed>(kind_); }

  double sample(mc::Engine& rng) const;
  /// E[lambda^2]; +infinity when it does not exist.
  double second_moment() const;
  std::optional<TailCertificate> tail_certificate() const;

 private:
  Kind kind_;
};

/// Y | theta ~ N(theta, noise_var / n) under the global-local prior.
struct ScalarShrinkageModel {
  ShrinkagePrior prior;
  double noise_var = 1.0;
  std::int64_t n = 1;

  void validate() const;
  double c_snr() const { return static_cast<double>(n) / noise_var; }
};

/// Y ~ N(X beta, noise_var I), beta_j | lambda_j ~ N(0, lambda_j^2).
struct GlobalLocalRegression {
  Matrix design;
  double noise_var = 1.0;
  ShrinkagePrior local_prior;
};

/// I(theta; Y | lambda) = 1/2 ln(1 + c lambda^2). lambda = 0 gives 0.
double conditional_mi(const ScalarShrinkageModel& m, double lambda);

/// ln(1 + c lambda^2) / ln(n); needs n >= 3.
double random_deff(const ScalarShrinkageModel& m, double lambda);

/// E_lambda[I(theta; Y | lambda)] by Monte Carlo; exact for a fixed scale.
McEstimate expected_conditional_mi(const ScalarShrinkageModel& m, std::int64_t samples,
                                   std::uint64_t seed, int threads = 1);

/// 1/2 ln(1 + c E[lambda^2]) when the second moment is finite.
std::optional<double> jensen_bound(const ScalarShrinkageModel& m);

/// ln(1 + c) + ln(1 + t0^2) + (2C/alpha) t0^{-alpha}, an upper bound on
/// E[ln(1 + c lambda^2)] for any lambda satisfying the certificate.
double heavy_tail_bound(const TailCertificate& cert, double c_snr);

/// Bias allowance of the nested log-mixture estimator, in nats.
inline constexpr double kNestedBiasAllowance = 0.01;

struct ChainDecomposition {
  McEstimate i_theta_y;
  McEstimate i_lambda_y;
  McEstimate e_cond_mi;
  double pooled_se = 0.0;
  /// i_theta_y <= i_lambda_y + e_cond_mi + 3 pooled_se + kNestedBiasAllowance
  bool bound_satisfied = false;
};

ChainDecomposition chain_decomposition(const ScalarShrinkageModel& m, std::int64_t outer_samples,
                                       std::int64_t inner_samples, std::uint64_t seed,
                                       int threads = 1);

/// 1/2 ln det(I + sigma^{-2} X diag(lambda^2) X^T).
double regression_conditional_mi(const GlobalLocalRegression& m, const Vector& lambdas);

struct DeffSummary {
  double mean = 0.0;
  double sd = 0.0;
  double std_error = 0.0;
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Nearest-rank quantile of a sorted sample: element ceil(q N) - 1.
double nearest_rank_quantile(const std::vector<double>& sorted, double q);

/// Distribution of the random effective dimension ln(1 + c lambda^2)/ln(n)
/// over prior draws of lambda.
DeffSummary random_deff_distribution(const ScalarShrinkageModel& m, std::int64_t samples,
                                     std::uint64_t seed, int threads = 1);

}  // namespace effdim
