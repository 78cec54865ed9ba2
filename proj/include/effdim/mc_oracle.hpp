#pragma once

#include <cstdint>

#include "effdim/gaussian_channel.hpp"
#include "effdim/monte_carlo.hpp"
#include "effdim/posterior_approx.hpp"
#include "effdim/shrinkage.hpp"

namespace effdim {

/// Monte Carlo estimate of I(Theta; Y) = E[ln p(y|theta) - ln p(y)] from
/// joint draws, with both densities evaluated analytically. Unbiased.
McEstimate estimate_channel_mi(const GaussianChannel& ch, std::int64_t n_samples,
                               std::uint64_t seed, int threads = 1);

/// Monte Carlo estimate of KL(q || N(0, prior_cov)) = E_q[ln q(x) - ln p0(x)].
McEstimate estimate_gaussian_kl(const GaussianDistribution& q, const Matrix& prior_cov,
                                std::int64_t n_samples, std::uint64_t seed, int threads = 1);

/// Nested estimates for the scalar global-local model. The marginal density
/// p(y) is replaced by the average of N(y; 0, lambda_k^2 + sigma^2/n) over a
/// pool of `inner_samples` prior draws taken from the auxiliary stream, so
/// ln p(y) carries a small downward-biased (consistent) error. The same
/// estimate of ln p(y) is used by both information terms.
struct MixtureDecomposition {
  McEstimate i_theta_y;   // E[ln p(y|theta) - ln p(y)]
  McEstimate i_lambda_y;  // E[ln p(y|lambda) - ln p(y)]
  McEstimate e_cond_mi;   // E[1/2 ln(1 + c lambda^2)] on the same outer draws
};

MixtureDecomposition estimate_mixture_decomposition(const ScalarShrinkageModel& m,
                                                    std::int64_t outer_samples,
                                                    std::int64_t inner_samples,
                                                    std::uint64_t seed, int threads = 1);

/// Marginal I(theta; Y) under the mixing law; inner count recorded in the
/// estimate's inner_samples field.
McEstimate estimate_mixture_marginal_mi(const ScalarShrinkageModel& m, std::int64_t outer_samples,
                                        std::int64_t inner_samples, std::uint64_t seed,
                                        int threads = 1);

}  // namespace effdim
