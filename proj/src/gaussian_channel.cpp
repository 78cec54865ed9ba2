#include "effdim/gaussian_channel.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>

#include "effdim/error.hpp"

namespace effdim {
namespace {

// B = L^{-1} A for the lower Cholesky factor L of the noise covariance.
Matrix whitened_forward(const GaussianChannel& ch) {
  const auto llt = linalg::cholesky(ch.noise_cov(), "noise covariance");
  return llt.matrixL().solve(ch.a());
}

Matrix whitened_gram(const GaussianChannel& ch) {
  const Matrix b = whitened_forward(ch);
  const Matrix w = b * ch.prior_cov() * b.transpose();
  return 0.5 * (w + w.transpose());
}

}  // namespace

GaussianChannel::GaussianChannel(Matrix a, Matrix prior_cov, Matrix noise_cov) {
  if (prior_cov.rows() != prior_cov.cols() || noise_cov.rows() != noise_cov.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "covariances must be square");
  }
  if (a.cols() != prior_cov.rows() || a.rows() != noise_cov.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "forward map is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " but prior is " + std::to_string(prior_cov.rows()) + "-dimensional and noise " +
                    std::to_string(noise_cov.rows()) + "-dimensional");
  }
  if (a.rows() == 0 || a.cols() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "channel dimensions must be positive");
  }
  if (!a.allFinite()) throw Error(ErrorCode::kInvalidArgument, "forward map has non-finite entries");
  a_ = std::move(a);
  prior_cov_ = linalg::clipped_psd(prior_cov, "prior covariance");
  noise_cov_ = linalg::symmetrized(noise_cov, "noise covariance");
  linalg::cholesky(noise_cov_, "noise covariance");
}

ChannelSpectrum whitened_spectrum(const GaussianChannel& ch) {
  const Vector values = linalg::eigenvalues_descending(whitened_gram(ch));
  ChannelSpectrum out;
  out.eigenvalues.resize(static_cast<std::size_t>(values.size()), 0.0);
  const double top = values.size() > 0 ? values(0) : 0.0;
  if (top <= 0.0) return out;
  const double cutoff = linalg::kRankCutoff * top;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (values(j) > cutoff) {
      out.eigenvalues[static_cast<std::size_t>(j)] = values(j);
      ++out.rank;
    }
  }
  return out;
}

double mutual_information(const GaussianChannel& ch, DeterminantForm form) {
  double mi = 0.0;
  switch (form) {
    case DeterminantForm::kSpectral: {
      const ChannelSpectrum spec = whitened_spectrum(ch);
      linalg::CompensatedSum sum;
      for (int j = 0; j < spec.rank; ++j) sum.add(std::log1p(spec.eigenvalues[static_cast<std::size_t>(j)]));
      mi = 0.5 * sum.value();
      break;
    }
    case DeterminantForm::kObservation: {
      const Matrix signal = ch.a() * ch.prior_cov() * ch.a().transpose();
      Matrix marginal = signal + ch.noise_cov();
      marginal = 0.5 * (marginal + marginal.transpose());
      const double top = linalg::log_det(linalg::cholesky(marginal, "marginal covariance"));
      const double bottom = linalg::log_det(linalg::cholesky(ch.noise_cov(), "noise covariance"));
      mi = 0.5 * (top - bottom);
      break;
    }
    case DeterminantForm::kParameter: {
      const auto llt = linalg::cholesky(ch.noise_cov(), "noise covariance");
      const Matrix info = ch.a().transpose() * llt.solve(ch.a());
      const Matrix m = Matrix::Identity(ch.dim(), ch.dim()) + ch.prior_cov() * info;
      const Eigen::PartialPivLU<Matrix> lu(m);
      mi = 0.5 * lu.matrixLU().diagonal().cwiseAbs().array().log().sum();
      break;
    }
    case DeterminantForm::kWhitenedGram: {
      const Matrix w = whitened_gram(ch);
      const Matrix m = Matrix::Identity(w.rows(), w.cols()) + w;
      mi = 0.5 * linalg::log_det(linalg::cholesky(m, "I + whitened Gram"));
      break;
    }
  }
  return std::max(mi, 0.0);
}

GaussianChannel coarsen(const GaussianChannel& ch, const Matrix& b) {
  if (b.cols() != ch.n_obs()) {
    throw Error(ErrorCode::kDimensionMismatch, "summary matrix must have n_obs columns");
  }
  if (b.rows() == 0 || b.rows() > ch.n_obs()) {
    throw Error(ErrorCode::kRankDeficientCoarsening, "summary must have 1..n_obs rows");
  }
  Matrix noise = b * ch.noise_cov() * b.transpose();
  noise = 0.5 * (noise + noise.transpose());
  try {
    linalg::cholesky(noise, "summary noise covariance");
  } catch (const Error&) {
    throw Error(ErrorCode::kRankDeficientCoarsening, "B N B^T is not positive definite");
  }
  return GaussianChannel(b * ch.a(), ch.prior_cov(), std::move(noise));
}

GaussianChannel reparameterize(const GaussianChannel& ch, const Matrix& t) {
  if (t.rows() != ch.dim() || t.cols() != ch.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "reparameterization must be p x p");
  }
  const Eigen::FullPivLU<Matrix> lu(t);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kSingularReparameterization, "reparameterization is singular");
  }
  // A T^{-1} = (T^{-T} A^T)^T
  const Matrix a_new = ch.a() * lu.inverse();
  Matrix prior = t * ch.prior_cov() * t.transpose();
  prior = 0.5 * (prior + prior.transpose());
  return GaussianChannel(a_new, std::move(prior), ch.noise_cov());
}

}  // namespace effdim
