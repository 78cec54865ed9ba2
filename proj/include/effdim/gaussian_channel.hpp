#pragma once

#include <vector>

#include "effdim/linalg.hpp"

namespace effdim {

/// Linear Gaussian channel Y = A Theta + eps with Theta ~ N(0, prior_cov)
/// and eps ~ N(0, noise_cov) independent of Theta.
///
/// Construction validates dimensions, symmetrizes both covariances, checks
/// that noise_cov is positive definite and clips the prior covariance to the
/// PSD cone. A constructed channel is always valid.
class GaussianChannel {
 public:
  GaussianChannel(Matrix a, Matrix prior_cov, Matrix noise_cov);

  const Matrix& a() const { return a_; }
  const Matrix& prior_cov() const { return prior_cov_; }
  const Matrix& noise_cov() const { return noise_cov_; }

  Eigen::Index n_obs() const { return a_.rows(); }
  Eigen::Index dim() const { return a_.cols(); }

 private:
  Matrix a_;
  Matrix prior_cov_;
  Matrix noise_cov_;
};

/// Eigenvalues of the whitened operator L^{-1} A prior_cov A^T L^{-T}.
struct ChannelSpectrum {
  std::vector<double> eigenvalues;  // nonincreasing, truncated entries are exactly 0
  int rank = 0;
};

ChannelSpectrum whitened_spectrum(const GaussianChannel& ch);

/// How the log-determinant is evaluated. All modes agree up to rounding.
enum class DeterminantForm {
  kSpectral,       // 1/2 sum log1p(lambda_j) over the whitened spectrum
  kObservation,    // 1/2 log det(I_n + A S A^T N^{-1}) as det(A S A^T + N) / det(N)
  kParameter,      // 1/2 log det(I_p + S A^T N^{-1} A), LU on a p x p matrix
  kWhitenedGram,   // 1/2 log det(I_n + W) by Cholesky of the whitened Gram
};

/// Mutual information I(Theta; Y) in nats. Never negative.
double mutual_information(const GaussianChannel& ch,
                          DeterminantForm form = DeterminantForm::kSpectral);

/// The experiment observed through the deterministic summary Y' = B Y.
/// Throws kRankDeficientCoarsening when B N B^T is not positive definite.
GaussianChannel coarsen(const GaussianChannel& ch, const Matrix& b);

/// The experiment for Phi = T Theta. Throws kSingularReparameterization when
/// T is not invertible.
GaussianChannel reparameterize(const GaussianChannel& ch, const Matrix& t);

}  // namespace effdim
