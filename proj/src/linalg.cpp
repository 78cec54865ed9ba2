#include "effdim/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "effdim/error.hpp"

namespace effdim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kNotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::kSampleSizeTooSmall: return "SampleSizeTooSmall";
    case ErrorCode::kRankDeficientCoarsening: return "RankDeficientCoarsening";
    case ErrorCode::kSingularReparameterization: return "SingularReparameterization";
    case ErrorCode::kEmptySpectrum: return "EmptySpectrum";
    case ErrorCode::kDivergentSpectrum: return "DivergentSpectrum";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

namespace linalg {

Matrix symmetrized(const Matrix& m, std::string_view name) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kNotSymmetric, std::string(name) + " is not square");
  }
  if (m.size() == 0) return m;
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!std::isfinite(scale) || asym > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::kNotSymmetric, std::string(name) + " is not symmetric");
  }
  return 0.5 * (m + m.transpose());
}

Eigen::LLT<Matrix> cholesky(const Matrix& m, std::string_view name) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success || !llt.matrixLLT().diagonal().allFinite() ||
      (llt.matrixLLT().diagonal().array() <= 0.0).any()) {
    throw Error(ErrorCode::kNotPositiveDefinite, std::string(name) + " is not positive definite");
  }
  return llt;
}

double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix clipped_psd(const Matrix& m, std::string_view name) {
  const Matrix sym = symmetrized(m, name);
  if (sym.size() == 0) return sym;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  Vector values = eig.eigenvalues();
  const double top = std::max(values.maxCoeff(), 0.0);
  if (values.minCoeff() < -kPsdTolerance * top || (top == 0.0 && values.minCoeff() < 0.0)) {
    throw Error(ErrorCode::kNotPositiveSemidefinite,
                std::string(name) + " has a significantly negative eigenvalue");
  }
  if (values.minCoeff() >= 0.0) return sym;
  values = values.cwiseMax(0.0);
  Matrix rebuilt = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (rebuilt + rebuilt.transpose());
}

Matrix psd_factor(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal();
}

Vector eigenvalues_descending(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse();
}

double normal_log_density(const Eigen::LLT<Matrix>& llt, double log_det, const Vector& x) {
  const Vector z = llt.matrixL().solve(x);
  const double dim = static_cast<double>(x.size());
  return -0.5 * (dim * std::log(2.0 * std::numbers::pi) + log_det + z.squaredNorm());
}

}  // namespace linalg
}  // namespace effdim
