#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <string_view>

namespace effdim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Relative asymmetry accepted before a matrix is rejected.
inline constexpr double kSymmetryTolerance = 1e-12;
/// Negative eigenvalues down to -kPsdTolerance * max eigenvalue are clipped to 0.
inline constexpr double kPsdTolerance = 1e-8;
/// Spectral entries at or below kRankCutoff * largest entry count as zero.
inline constexpr double kRankCutoff = 1e-12;

/// Returns (M + M^T)/2, or throws kNotSymmetric when M is not square or its
/// asymmetry exceeds kSymmetryTolerance relative to its largest entry.
Matrix symmetrized(const Matrix& m, std::string_view name);

/// Cholesky factor of a symmetric matrix; throws kNotPositiveDefinite.
Eigen::LLT<Matrix> cholesky(const Matrix& m, std::string_view name);

/// log det from a successful Cholesky factorisation.
double log_det(const Eigen::LLT<Matrix>& llt);

/// Symmetrizes, checks positive semidefiniteness and rebuilds the matrix with
/// small negative eigenvalues clipped to exactly zero.
Matrix clipped_psd(const Matrix& m, std::string_view name);

/// Symmetric square root factor R with R R^T = m, for PSD m.
Matrix psd_factor(const Matrix& m);

/// Eigenvalues of a symmetric matrix in nonincreasing order.
Vector eigenvalues_descending(const Matrix& sym);

/// Multivariate normal log density N(x; 0, LL^T) given the factorisation and
/// its log determinant.
double normal_log_density(const Eigen::LLT<Matrix>& llt, double log_det, const Vector& x);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace linalg
}  // namespace effdim
