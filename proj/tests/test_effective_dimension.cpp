#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "effdim/effective_dimension.hpp"
#include "effdim/error.hpp"
#include "effdim/gaussian_channel.hpp"
#include "test_support.hpp"

using namespace effdim;
using effdim::testing::log_uniform;
using effdim::testing::random_dim;
using effdim::testing::random_matrix;
using effdim::testing::ref_log_det;
using effdim::testing::rel_diff;

namespace {

std::vector<double> random_spectrum(std::mt19937_64& rng, int max_rank) {
  const auto r = random_dim(rng, 1, max_rank);
  std::vector<double> s2(static_cast<std::size_t>(r));
  for (auto& v : s2) v = log_uniform(rng, 1e-3, 1e3);
  std::sort(s2.begin(), s2.end(), std::greater<>());
  return s2;
}

}  // namespace

TEST(Deff, NormalizesByLogSampleSize) {
  EXPECT_EQ(deff(0.0, 100), 0.0);
  EXPECT_NEAR(deff(std::log(10.0), 100), 1.0, 1e-15);
  EXPECT_NEAR(deff(0.5 * std::log(101.0), 100), std::log(101.0) / std::log(100.0), 1e-15);
  EXPECT_NEAR(deff(0.5 * std::log(101.0), 100), 1.002161, 5e-7);
  EXPECT_THROW(deff(1.0, 2), Error);
}

TEST(Location, ClosedForm) {
  EXPECT_EQ(location_mi({1, 0.0, 1.0, 100}), 0.0);
  EXPECT_NEAR(location_mi({1, 1.0, 1.0, 1}), 0.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(location_mi({3, 1.0, 1.0, 100}), 1.5 * std::log(101.0), 1e-12);
  EXPECT_NEAR(location_mi({3, 1.0, 1.0, 100}), 6.9226808, 5e-8);
}

TEST(Location, DeffApproachesDimension) {
  for (int d : {1, 2, 5}) {
    const double v = deff(location_mi({d, 1.0, 1.0, 1000000}), 1000000);
    EXPECT_LE(std::abs(v - d), 1e-5 * d);
  }
}

// The gap to d shrinks with n; the approach is from above when tau^2 >= sigma^2.
TEST(Location, DeffConvergesMonotonically) {
  for (double tau2 : {0.01, 1.0, 100.0}) {
    double prev_gap = 1e300;
    double prev = tau2 >= 1.0 ? 1e300 : 0.0;
    for (std::int64_t n : {10, 100, 1000, 100000, 1000000}) {
      const double v = deff(location_mi({2, tau2, 1.0, n}), n);
      EXPECT_LT(std::abs(v - 2.0), prev_gap) << "tau2=" << tau2 << " n=" << n;
      if (tau2 >= 1.0) EXPECT_LT(v, prev);
      else EXPECT_GT(v, prev);
      prev_gap = std::abs(v - 2.0);
      prev = v;
    }
  }
}

TEST(Regression, IdentityAndZeroDesigns) {
  EXPECT_EQ(regression_mi(RidgeModel{Matrix::Zero(4, 3), 1.0, 1.0}).mi_nats, 0.0);
  EXPECT_NEAR(regression_mi(RidgeModel{Matrix::Identity(3, 3), 1.0, 1.0}).mi_nats,
              1.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(1.5 * std::log(2.0), 1.039721, 5e-7);
}

TEST(Regression, MatchesDirectLogDetAndChannel) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const auto n = random_dim(rng, 1, 8);
    const auto p = random_dim(rng, 1, 6);
    const RidgeModel m{random_matrix(rng, n, p), log_uniform(rng, 0.1, 10.0), log_uniform(rng, 0.1, 10.0)};
    const double mi = regression_mi(m).mi_nats;
    const Matrix gram = Matrix::Identity(p, p) + m.snr() * m.design.transpose() * m.design;
    EXPECT_LE(rel_diff(mi, 0.5 * ref_log_det(gram)), 1e-9);
    const GaussianChannel ch(m.design, m.prior_var * Matrix::Identity(p, p),
                             m.noise_var * Matrix::Identity(n, n));
    EXPECT_LE(rel_diff(mi, mutual_information(ch)), 1e-9);
  }
}

TEST(InfoRank, KnownValues) {
  const std::vector<double> equal(5, 2.0);
  EXPECT_NEAR(info_effective_rank(equal, 0.7), 5.0, 1e-14);
  const std::vector<double> single{3.0};
  EXPECT_NEAR(info_effective_rank(single, 1.0), 1.0, 1e-15);
  const std::vector<double> two{4.0, 1.0};
  const double expected = (std::log(5.0) + std::log(2.0)) / std::log(5.0);
  EXPECT_NEAR(info_effective_rank(two, 1.0), expected, 1e-14);
  EXPECT_NEAR(info_effective_rank(two, 1.0), 1.4306766, 5e-8);
}

TEST(InfoRank, BoundedByRankAndDecompositionHolds) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto s2 = random_spectrum(rng, 8);
    const double snr = log_uniform(rng, 1e-3, 1e3);
    const double r = info_effective_rank(s2, snr);
    EXPECT_GE(r, 1.0 - 1e-12);
    EXPECT_LE(r, static_cast<double>(s2.size()) + 1e-12);
    DesignSpectrum spec;
    spec.singular_values_sq = s2;
    for (double v : s2) spec.singular_values.push_back(std::sqrt(v));
    spec.rank = static_cast<int>(s2.size());
    const double mi = regression_mi(spec, snr).mi_nats;
    EXPECT_LE(rel_diff(mi, 0.5 * std::log1p(snr * s2[0]) * r), 1e-10);
  }
}

TEST(InfoRank, FasterDecayLowersRank) {
  for (double q : {0.9, 0.5, 0.2}) {
    std::vector<double> slow, fast;
    for (int j = 0; j < 6; ++j) {
      slow.push_back(std::pow(q, j));
      fast.push_back(std::pow(q * 0.5, j));
    }
    EXPECT_LT(info_effective_rank(fast, 1.0), info_effective_rank(slow, 1.0));
  }
}

TEST(RidgeDf, KnownValues) {
  const std::vector<double> two{4.0, 1.0};
  EXPECT_NEAR(ridge_df(two, 1.0), 1.3, 1e-15);
  const std::vector<double> five(5, 1.0);
  EXPECT_NEAR(ridge_df(five, 1.0), 2.5, 1e-15);
  const std::vector<double> ones{1.0, 1.0};
  EXPECT_NEAR(ridge_df(ones, 1e12), 2e-12, 1e-20);
}

TEST(RidgeDf, EqualsTraceOfSmoothingMatrix) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const auto n = random_dim(rng, 2, 7);
    const auto p = random_dim(rng, 1, 5);
    const Matrix x = random_matrix(rng, n, p);
    const double alpha = log_uniform(rng, 0.01, 100.0);
    // Reference: X (X^T X + alpha I)^{-1} X^T built directly.
    const Matrix h = x * (x.transpose() * x + alpha * Matrix::Identity(p, p)).inverse() * x.transpose();
    EXPECT_LE(rel_diff(ridge_df(design_spectrum(x).singular_values_sq, alpha), h.trace()), 1e-10);
    EXPECT_LE(rel_diff(smoothing_matrix(x, alpha).trace(), h.trace()), 1e-10);
  }
}

TEST(Sandwich, KnownValues) {
  const Sandwich zero = mi_df_sandwich(RidgeModel{Matrix::Zero(3, 2), 1.0, 1.0});
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_EQ(zero.mid, 0.0);
  EXPECT_EQ(zero.upper, 0.0);
  const std::vector<double> unit{1.0};
  const Sandwich one = mi_df_sandwich(unit, 1.0);
  EXPECT_NEAR(one.lower, 0.5, 1e-15);
  EXPECT_NEAR(one.mid, std::log(2.0), 1e-15);
  EXPECT_NEAR(one.upper, 1.0, 1e-15);
}

TEST(Sandwich, StrictOnRandomSquareDesign) {
  std::mt19937_64 rng(3);
  const Sandwich s = mi_df_sandwich(RidgeModel{random_matrix(rng, 5, 5), 1.0, 1.0});
  EXPECT_LT(s.lower, s.mid);
  EXPECT_LT(s.mid, s.upper);
}

TEST(Sandwich, PerModeInequality) {
  for (double u : {1e-8, 1.0, 1e8}) {
    EXPECT_LE(u / (1.0 + u), std::log1p(u));
    EXPECT_LE(std::log1p(u), u);
  }
}

TEST(Sandwich, HoldsAcrossSignalStrengths) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 1000; ++t) {
    const auto s2 = random_spectrum(rng, 10);
    const Sandwich s = mi_df_sandwich(s2, log_uniform(rng, 1e-6, 1e6));
    EXPECT_LE(s.lower, s.mid);
    EXPECT_LE(s.mid, s.upper);
  }
}

TEST(SpectrumSequence, ZeroSignal) {
  const SequenceMi r = spectrum_sequence_mi({1.0, 0.0, 1e-6});
  EXPECT_EQ(r.mi_nats, 0.0);
  EXPECT_EQ(r.terms_used, 1);
}

TEST(SpectrumSequence, MatchesLongBruteForceSum) {
  const SequenceMi r = spectrum_sequence_mi({1.0, 1.0, 1e-6});
  EXPECT_LE(r.truncation_bound, 1e-6);
  long double brute = 0.0L;
  for (std::int64_t j = 10000000; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    brute += std::log1p(1.0 / (jd * jd));
  }
  EXPECT_NEAR(r.mi_nats, 0.5 * static_cast<double>(brute), 1e-6);
  // sinh(pi)/pi gives the infinite product.
  EXPECT_NEAR(r.mi_nats, 0.5 * std::log(std::sinh(M_PI) / M_PI), 1e-6);
}

TEST(SpectrumSequence, StableUnderBudgetRefinement) {
  const SequenceMi coarse = spectrum_sequence_mi({1.0, 1.0, 1e-8});
  const SequenceMi fine = spectrum_sequence_mi({1.0, 1.0, 1e-9});
  EXPECT_GT(fine.terms_used, coarse.terms_used);
  EXPECT_NEAR(fine.mi_nats, coarse.mi_nats, 1e-8);
  EXPECT_LE(fine.mi_nats - coarse.mi_nats, coarse.truncation_bound);
}

TEST(SpectrumSequence, RejectsNonSummableDecay) {
  EXPECT_THROW(spectrum_sequence_mi({0.5, 1.0, 1e-6}), Error);
}

TEST(RankBound, DominatesDeff) {
  EXPECT_EQ(deff_rank_bound(RidgeModel{Matrix::Zero(3, 2), 1.0, 1.0}, 10), 0.0);
  std::mt19937_64 rng(13);
  const RidgeModel m{random_matrix(rng, 6, 4), 1.0, 1.0};
  EXPECT_GE(deff_rank_bound(m, 100), deff(regression_mi(m).mi_nats, 100));
  // Single mode: bound and d_eff coincide.
  const RidgeModel single{Matrix::Constant(3, 1, 1.0), 1.0, 2.0};
  EXPECT_NEAR(deff_rank_bound(single, 50), deff(regression_mi(single).mi_nats, 50), 1e-14);
}

TEST(RegressionReport, IdentityDesign) {
  const InfoReport r = regression_report(RidgeModel{Matrix::Identity(3, 3), 1.0, 1.0}, 3);
  EXPECT_NEAR(r.mi_nats, 1.5 * std::log(2.0), 1e-15);
  ASSERT_TRUE(r.df && r.r_info);
  EXPECT_NEAR(*r.df, 1.5, 1e-15);
  EXPECT_NEAR(*r.r_info, 3.0, 1e-14);
  EXPECT_EQ(r.d_eff, 2.0 * r.mi_nats / std::log(3.0));
}

TEST(RegressionReport, InvariantsOnRandomDesigns) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 50; ++t) {
    const RidgeModel m{random_matrix(rng, random_dim(rng, 1, 7), random_dim(rng, 1, 5)),
                       log_uniform(rng, 0.1, 10.0), log_uniform(rng, 0.1, 10.0)};
    const std::int64_t n = random_dim(rng, 3, 1000);
    const InfoReport r = regression_report(m, n);
    EXPECT_EQ(r.d_eff, deff(r.mi_nats, n));
    EXPECT_LE(r.sandwich_lower, 2.0 * r.mi_nats);
    EXPECT_LE(2.0 * r.mi_nats, r.sandwich_upper);
    EXPECT_GE(r.rank_bound, r.d_eff);
  }
}
