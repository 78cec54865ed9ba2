#include "effdim/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "effdim/effective_dimension.hpp"
#include "effdim/error.hpp"
#include "effdim/gaussian_channel.hpp"
#include "effdim/mc_oracle.hpp"

namespace effdim {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

void TailCertificate::validate() const {
  if (!positive_finite(c_const) || !positive_finite(alpha_exp) || !(t0 >= 1.0) || !std::isfinite(t0)) {
    throw Error(ErrorCode::kInvalidArgument, "tail certificate needs C > 0, alpha > 0, t0 >= 1");
  }
}

ShrinkagePrior::ShrinkagePrior(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const prior::Fixed& p) {
                   if (!positive_finite(p.scale)) throw Error(ErrorCode::kInvalidArgument, "fixed scale must be > 0");
                 },
                 [](const prior::InverseGammaMixture& p) {
                   if (!positive_finite(p.dof) || !positive_finite(p.scale_sq)) {
                     throw Error(ErrorCode::kInvalidArgument, "Student-t prior needs dof > 0 and scale_sq > 0");
                   }
                 },
                 [](const prior::HalfCauchy& p) {
                   if (!positive_finite(p.global_scale)) {
                     throw Error(ErrorCode::kInvalidArgument, "half-Cauchy global scale must be > 0");
                   }
                 },
                 [](const prior::Tabulated& p) {
                   if (p.values.empty()) throw Error(ErrorCode::kInvalidArgument, "scale table is empty");
                   for (double v : p.values) {
                     if (!(v >= 0.0) || !std::isfinite(v)) {
                       throw Error(ErrorCode::kInvalidArgument, "scale table entries must be finite and >= 0");
                     }
                   }
                 },
             },
             kind_);
}

std::string ShrinkagePrior::name() const {
  return std::visit(Overloaded{
                        [](const prior::Fixed&) { return std::string("fixed"); },
                        [](const prior::InverseGammaMixture&) { return std::string("student-t"); },
                        [](const prior::HalfCauchy&) { return std::string("half-cauchy"); },
                        [](const prior::Tabulated&) { return std::string("table"); },
                    },
                    kind_);
}

double ShrinkagePrior::sample(mc::Engine& rng) const {
  return std::visit(
      Overloaded{
          [](const prior::Fixed& p) { return p.scale; },
          [&rng](const prior::InverseGammaMixture& p) {
            std::gamma_distribution<double> gamma(0.5 * p.dof, 1.0);
            const double g = gamma(rng);
            return std::sqrt(0.5 * p.dof * p.scale_sq / g);
          },
          [&rng](const prior::HalfCauchy& p) {
            // Quantile of |Cauchy|: tan(pi u / 2).
            return p.global_scale * std::tan(0.5 * std::numbers::pi * mc::uniform_open(rng));
          },
          [&rng](const prior::Tabulated& p) {
            const auto size = static_cast<double>(p.values.size());
            auto idx = static_cast<std::size_t>(mc::uniform_open(rng) * size);
            return p.values[std::min(idx, p.values.size() - 1)];
          },
      },
      kind_);
}

double ShrinkagePrior::second_moment() const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{
                        [](const prior::Fixed& p) { return p.scale * p.scale; },
                        [](const prior::InverseGammaMixture& p) {
                          return p.dof > 2.0 ? p.dof * p.scale_sq / (p.dof - 2.0) : kInf;
                        },
                        [](const prior::HalfCauchy&) { return kInf; },
                        [](const prior::Tabulated& p) {
                          linalg::CompensatedSum sum;
                          for (double v : p.values) sum.add(v * v);
                          return sum.value() / static_cast<double>(p.values.size());
                        },
                    },
                    kind_);
}

std::optional<TailCertificate> ShrinkagePrior::tail_certificate() const {
  if (const auto* hc = std::get_if<prior::HalfCauchy>(&kind_)) {
    // P(lambda >= t) = (2/pi) arctan(tau_g / t) <= (2 tau_g / pi) / t.
    return TailCertificate{2.0 * hc->global_scale / std::numbers::pi, 1.0, 1.0};
  }
  return std::nullopt;
}

void ScalarShrinkageModel::validate() const {
  if (!positive_finite(noise_var)) throw Error(ErrorCode::kInvalidArgument, "noise variance must be > 0");
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
}

double conditional_mi(const ScalarShrinkageModel& m, double lambda) {
  m.validate();
  if (!(lambda >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
  return 0.5 * std::log1p(m.c_snr() * lambda * lambda);
}

double random_deff(const ScalarShrinkageModel& m, double lambda) {
  return deff(conditional_mi(m, lambda), m.n);
}

McEstimate expected_conditional_mi(const ScalarShrinkageModel& m, std::int64_t samples,
                                   std::uint64_t seed, int threads) {
  m.validate();
  if (samples < 1000) throw Error(ErrorCode::kInsufficientSamples, "need at least 1000 samples");
  if (const auto* f = std::get_if<prior::Fixed>(&m.prior.kind())) {
    return McEstimate::exact(conditional_mi(m, f->scale), samples, seed);
  }
  const double c = m.c_snr();
  const auto moments = mc::run_chunked(samples, seed, threads,
                                       [&](mc::Engine& rng, RunningMoments& acc, std::int64_t, std::int64_t count) {
                                         for (std::int64_t i = 0; i < count; ++i) {
                                           const double lambda = m.prior.sample(rng);
                                           acc.add(0.5 * std::log1p(c * lambda * lambda));
                                         }
                                       });
  return mc::to_estimate(moments, seed);
}

std::optional<double> jensen_bound(const ScalarShrinkageModel& m) {
  m.validate();
  const double second = m.prior.second_moment();
  if (!std::isfinite(second)) return std::nullopt;
  return 0.5 * std::log1p(m.c_snr() * second);
}

double heavy_tail_bound(const TailCertificate& cert, double c_snr) {
  cert.validate();
  if (!(c_snr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "c must be positive");
  return std::log1p(c_snr) + std::log1p(cert.t0 * cert.t0) +
         2.0 * cert.c_const / cert.alpha_exp * std::pow(cert.t0, -cert.alpha_exp);
}

ChainDecomposition chain_decomposition(const ScalarShrinkageModel& m, std::int64_t outer_samples,
                                       std::int64_t inner_samples, std::uint64_t seed, int threads) {
  if (outer_samples < 10000 || inner_samples < 10000) {
    throw Error(ErrorCode::kInsufficientSamples, "nested estimator needs >= 1e4 outer and inner samples");
  }
  const MixtureDecomposition d = estimate_mixture_decomposition(m, outer_samples, inner_samples, seed, threads);
  ChainDecomposition out;
  out.i_theta_y = d.i_theta_y;
  out.i_lambda_y = d.i_lambda_y;
  out.e_cond_mi = d.e_cond_mi;
  out.pooled_se = std::sqrt(d.i_theta_y.std_error * d.i_theta_y.std_error +
                            d.i_lambda_y.std_error * d.i_lambda_y.std_error +
                            d.e_cond_mi.std_error * d.e_cond_mi.std_error);
  out.bound_satisfied = d.i_theta_y.estimate <= d.i_lambda_y.estimate + d.e_cond_mi.estimate +
                                                     3.0 * out.pooled_se + kNestedBiasAllowance;
  return out;
}

double regression_conditional_mi(const GlobalLocalRegression& m, const Vector& lambdas) {
  if (lambdas.size() != m.design.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one local scale per design column");
  }
  if ((lambdas.array() < 0.0).any() || !lambdas.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "local scales must be finite and >= 0");
  }
  // A common scale is the ridge model itself.
  if (lambdas.size() > 0 && (lambdas.array() == lambdas(0)).all()) {
    return regression_mi(RidgeModel{m.design, m.noise_var, lambdas(0) * lambdas(0)}).mi_nats;
  }
  const Eigen::Index n_obs = m.design.rows();
  const Matrix prior_cov = lambdas.cwiseAbs2().asDiagonal();
  const Matrix noise = m.noise_var * Matrix::Identity(n_obs, n_obs);
  return mutual_information(GaussianChannel(m.design, prior_cov, noise));
}

double nearest_rank_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kInsufficientSamples, "quantile of an empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "quantile level must be in (0, 1]");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

DeffSummary random_deff_distribution(const ScalarShrinkageModel& m, std::int64_t samples,
                                     std::uint64_t seed, int threads) {
  m.validate();
  if (m.n < 3) throw Error(ErrorCode::kSampleSizeTooSmall, "random effective dimension needs n >= 3");
  if (samples < 10000) throw Error(ErrorCode::kInsufficientSamples, "need at least 1e4 samples");
  const double c = m.c_snr();
  const double log_n = std::log(static_cast<double>(m.n));
  std::vector<double> values(static_cast<std::size_t>(samples));
  const auto moments = mc::run_chunked(samples, seed, threads,
                                       [&](mc::Engine& rng, RunningMoments& acc, std::int64_t begin, std::int64_t count) {
                                         for (std::int64_t i = 0; i < count; ++i) {
                                           const double lambda = m.prior.sample(rng);
                                           const double d = std::log1p(c * lambda * lambda) / log_n;
                                           values[static_cast<std::size_t>(begin + i)] = d;
                                           acc.add(d);
                                         }
                                       });
  std::sort(values.begin(), values.end());
  DeffSummary s;
  s.mean = moments.mean();
  s.sd = std::sqrt(moments.variance());
  s.std_error = moments.std_error();
  s.q05 = nearest_rank_quantile(values, 0.05);
  s.q25 = nearest_rank_quantile(values, 0.25);
  s.q50 = nearest_rank_quantile(values, 0.50);
  s.q75 = nearest_rank_quantile(values, 0.75);
  s.q95 = nearest_rank_quantile(values, 0.95);
  s.n_samples = samples;
  s.seed = seed;
  return s;
}

}  // namespace effdim
