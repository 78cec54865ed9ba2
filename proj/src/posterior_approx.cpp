#include "effdim/posterior_approx.hpp"

#include <algorithm>
#include <cmath>

#include "effdim/error.hpp"

namespace effdim {

GaussianDistribution::GaussianDistribution(Vector mean, Matrix cov) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "mean and covariance dimensions differ");
  }
  if (mean.size() == 0) throw Error(ErrorCode::kDimensionMismatch, "empty distribution");
  if (!mean.allFinite()) throw Error(ErrorCode::kInvalidArgument, "mean has non-finite entries");
  cov_ = linalg::symmetrized(cov, "covariance");
  linalg::cholesky(cov_, "covariance");
  mean_ = std::move(mean);
}

double gaussian_kl(const GaussianDistribution& q, const Matrix& prior_cov) {
  if (prior_cov.rows() != q.dim() || prior_cov.cols() != q.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "prior covariance dimension differs");
  }
  const Matrix s0 = linalg::symmetrized(prior_cov, "prior covariance");
  const auto prior = linalg::cholesky(s0, "prior covariance");
  const auto post = linalg::cholesky(q.cov(), "covariance");

  const Matrix l_post = post.matrixL();
  const double trace = prior.matrixL().solve(l_post).squaredNorm();
  const double quad = prior.matrixL().solve(q.mean()).squaredNorm();
  const double logdet = linalg::log_det(post) - linalg::log_det(prior);
  const double kl = 0.5 * (trace + quad - logdet - static_cast<double>(q.dim()));
  return std::max(kl, 0.0);
}

double relative_log_det(const Matrix& cov, const Matrix& prior_cov) {
  if (cov.rows() != prior_cov.rows() || cov.cols() != prior_cov.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "covariance dimensions differ");
  }
  return linalg::log_det(linalg::cholesky(linalg::symmetrized(cov, "covariance"), "covariance")) -
         linalg::log_det(linalg::cholesky(linalg::symmetrized(prior_cov, "prior covariance"),
                                          "prior covariance"));
}

ConjugateInfoTerms conjugate_regression_terms(const RidgeModel& m) {
  m.validate();
  if (!(m.prior_var > 0.0)) throw Error(ErrorCode::kInvalidArgument, "needs prior_var > 0");
  const Eigen::Index p = m.design.cols();
  Matrix precision = m.design.transpose() * m.design / m.noise_var;
  precision.diagonal().array() += 1.0 / m.prior_var;
  const auto llt = linalg::cholesky(precision, "posterior precision");
  Matrix post_cov = llt.solve(Matrix::Identity(p, p));
  post_cov = 0.5 * (post_cov + post_cov.transpose());

  // S0^{-1} S with S0 = tau^2 I
  const Matrix relative = post_cov / m.prior_var;
  ConjugateInfoTerms t;
  t.dim = p;
  t.expected_trace = relative.trace();
  t.expected_quadratic = (Matrix::Identity(p, p) - relative).trace();
  t.expected_log_det = linalg::log_det(linalg::cholesky(relative, "relative posterior covariance"));
  t.info = std::max(0.0, 0.5 * (t.expected_trace + t.expected_quadratic - t.expected_log_det -
                                static_cast<double>(p)));
  return t;
}

double conjugate_regression_info(const RidgeModel& m) { return conjugate_regression_terms(m).info; }

bool loewner_dominates(const Matrix& sigma_tilde, const Matrix& sigma, double tol) {
  if (sigma_tilde.rows() != sigma.rows() || sigma_tilde.cols() != sigma.cols() ||
      sigma.rows() != sigma.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "Loewner comparison needs equal square matrices");
  }
  if (!(tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  if (sigma.size() == 0) return true;
  const Matrix diff = sigma_tilde - sigma;
  const Vector values = linalg::eigenvalues_descending(0.5 * (diff + diff.transpose()));
  const double scale = values.cwiseAbs().maxCoeff();
  return values.minCoeff() >= -tol * (scale + 1.0);
}

ApproxAuditReport audit_approximation(const GaussianDistribution& exact,
                                      const GaussianDistribution& approx, const Matrix& prior_cov,
                                      std::int64_t n) {
  if (exact.dim() != approx.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "exact and approximate dimensions differ");
  }
  ApproxAuditReport r;
  r.n = n;
  r.kl_exact = gaussian_kl(exact, prior_cov);
  r.kl_approx = gaussian_kl(approx, prior_cov);
  r.deff_exact = deff(r.kl_exact, n);
  r.deff_approx = deff(r.kl_approx, n);
  r.logdet_exact = relative_log_det(exact.cov(), prior_cov);
  r.logdet_approx = relative_log_det(approx.cov(), prior_cov);
  r.loewner_dominates = loewner_dominates(approx.cov(), exact.cov());
  r.means_equal = exact.mean() == approx.mean();
  r.logdet_order_guaranteed = r.loewner_dominates && r.means_equal;
  r.within_prior = loewner_dominates(prior_cov, approx.cov());
  r.kl_order_guaranteed = r.logdet_order_guaranteed && r.within_prior;
  r.kl_order_holds = r.kl_approx <= r.kl_exact;
  return r;
}

DominatingDiagonal dominating_diagonal(const Matrix& sigma) {
  const Matrix s = linalg::symmetrized(sigma, "covariance");
  linalg::cholesky(s, "covariance");
  const Matrix diag = s.diagonal().asDiagonal();
  DominatingDiagonal out{diag, 1.0};
  // The correlation matrix has eigenvalues <= p, so c <= 2p terminates this.
  const double limit = 4.0 * static_cast<double>(s.rows()) + 4.0;
  while (!loewner_dominates(out.multiplier * diag, s) && out.multiplier < limit) {
    out.multiplier *= 2.0;
  }
  out.cov = out.multiplier * diag;
  return out;
}

}  // namespace effdim
