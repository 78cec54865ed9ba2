#include "effdim/mc_oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "effdim/error.hpp"

namespace effdim {
namespace {

constexpr std::int64_t kMinSamples = 10000;

void require_samples(std::int64_t n, std::int64_t minimum) {
  if (n < minimum) {
    throw Error(ErrorCode::kInsufficientSamples,
                "need at least " + std::to_string(minimum) + " samples, got " + std::to_string(n));
  }
}

Vector standard_normal(mc::Engine& rng, std::normal_distribution<double>& normal, Eigen::Index dim) {
  Vector z(dim);
  for (Eigen::Index i = 0; i < dim; ++i) z(i) = normal(rng);
  return z;
}

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

}  // namespace

McEstimate estimate_channel_mi(const GaussianChannel& ch, std::int64_t n_samples, std::uint64_t seed,
                               int threads) {
  require_samples(n_samples, kMinSamples);
  const Matrix prior_root = linalg::psd_factor(ch.prior_cov());
  const auto noise = linalg::cholesky(ch.noise_cov(), "noise covariance");
  const Matrix noise_l = noise.matrixL();
  const double noise_logdet = linalg::log_det(noise);
  Matrix marginal_cov = ch.a() * ch.prior_cov() * ch.a().transpose() + ch.noise_cov();
  marginal_cov = 0.5 * (marginal_cov + marginal_cov.transpose());
  const auto marginal = linalg::cholesky(marginal_cov, "marginal covariance");
  const double marginal_logdet = linalg::log_det(marginal);

  const auto moments = mc::run_chunked(
      n_samples, seed, threads, [&](mc::Engine& rng, RunningMoments& acc, std::int64_t, std::int64_t count) {
        std::normal_distribution<double> normal;
        for (std::int64_t i = 0; i < count; ++i) {
          const Vector theta = prior_root * standard_normal(rng, normal, ch.dim());
          const Vector eps = noise_l * standard_normal(rng, normal, ch.n_obs());
          const Vector y = ch.a() * theta + eps;
          acc.add(linalg::normal_log_density(noise, noise_logdet, eps) -
                  linalg::normal_log_density(marginal, marginal_logdet, y));
        }
      });
  return mc::to_estimate(moments, seed);
}

McEstimate estimate_gaussian_kl(const GaussianDistribution& q, const Matrix& prior_cov,
                                std::int64_t n_samples, std::uint64_t seed, int threads) {
  require_samples(n_samples, kMinSamples);
  if (prior_cov.rows() != q.dim() || prior_cov.cols() != q.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "prior covariance dimension differs");
  }
  const auto post = linalg::cholesky(q.cov(), "covariance");
  const Matrix post_l = post.matrixL();
  const double post_logdet = linalg::log_det(post);
  const auto prior = linalg::cholesky(linalg::symmetrized(prior_cov, "prior covariance"), "prior covariance");
  const double prior_logdet = linalg::log_det(prior);

  const auto moments = mc::run_chunked(
      n_samples, seed, threads, [&](mc::Engine& rng, RunningMoments& acc, std::int64_t, std::int64_t count) {
        std::normal_distribution<double> normal;
        for (std::int64_t i = 0; i < count; ++i) {
          const Vector dev = post_l * standard_normal(rng, normal, q.dim());
          const Vector x = q.mean() + dev;
          acc.add(linalg::normal_log_density(post, post_logdet, dev) -
                  linalg::normal_log_density(prior, prior_logdet, x));
        }
      });
  return mc::to_estimate(moments, seed);
}

MixtureDecomposition estimate_mixture_decomposition(const ScalarShrinkageModel& m,
                                                    std::int64_t outer_samples,
                                                    std::int64_t inner_samples, std::uint64_t seed,
                                                    int threads) {
  m.validate();
  require_samples(outer_samples, kMinSamples);
  require_samples(inner_samples, kMinSamples);
  const double noise = m.noise_var / static_cast<double>(m.n);
  const double c = m.c_snr();

  // log N(y; 0, v) = offset(v) - y^2 * curvature(v)
  auto offset = [](double v) { return -0.5 * (kLog2Pi + std::log(v)); };
  auto curvature = [](double v) { return 0.5 / v; };

  std::vector<double> pool_offset(static_cast<std::size_t>(inner_samples));
  std::vector<double> pool_curv(static_cast<std::size_t>(inner_samples));
  {
    mc::Engine rng(mc::derive_seed(seed, mc::kAuxStream));
    for (std::size_t k = 0; k < pool_offset.size(); ++k) {
      const double lambda = m.prior.sample(rng);
      const double v = lambda * lambda + noise;
      pool_offset[k] = offset(v);
      pool_curv[k] = curvature(v);
    }
  }
  const double log_pool = std::log(static_cast<double>(inner_samples));

  auto log_marginal = [&](double y2) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pool_offset.size(); ++k) {
      top = std::max(top, pool_offset[k] - y2 * pool_curv[k]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < pool_offset.size(); ++k) {
      sum += std::exp(pool_offset[k] - y2 * pool_curv[k] - top);
    }
    return top + (std::log(sum) - log_pool);
  };

  const auto moments = mc::run_chunked_multi(
      outer_samples, seed, threads, 3,
      [&](mc::Engine& rng, std::vector<RunningMoments>& acc, std::int64_t, std::int64_t count) {
        std::normal_distribution<double> normal;
        for (std::int64_t i = 0; i < count; ++i) {
          const double lambda = m.prior.sample(rng);
          const double theta = lambda * normal(rng);
          const double e = std::sqrt(noise) * normal(rng);
          const double y = theta + e;
          const double y2 = y * y;
          const double lm = log_marginal(y2);
          const double v = lambda * lambda + noise;
          acc[0].add(offset(noise) - e * e * curvature(noise) - lm);
          acc[1].add(offset(v) - y2 * curvature(v) - lm);
          acc[2].add(0.5 * std::log1p(c * lambda * lambda));
        }
      });

  MixtureDecomposition out{mc::to_estimate(moments[0], seed), mc::to_estimate(moments[1], seed),
                           mc::to_estimate(moments[2], seed)};
  out.i_theta_y.inner_samples = inner_samples;
  out.i_lambda_y.inner_samples = inner_samples;
  return out;
}

McEstimate estimate_mixture_marginal_mi(const ScalarShrinkageModel& m, std::int64_t outer_samples,
                                        std::int64_t inner_samples, std::uint64_t seed, int threads) {
  return estimate_mixture_decomposition(m, outer_samples, inner_samples, seed, threads).i_theta_y;
}

}  // namespace effdim
