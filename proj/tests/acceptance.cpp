// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "effdim/cli.hpp"
#include "effdim/effective_dimension.hpp"
#include "effdim/gaussian_channel.hpp"
#include "effdim/mc_oracle.hpp"
#include "effdim/posterior_approx.hpp"
#include "effdim/shrinkage.hpp"
#include "test_support.hpp"

#ifndef EFFDIM_GOLDEN_DIR
#error "EFFDIM_GOLDEN_DIR must point at tests/golden"
#endif

using namespace effdim;
using effdim::testing::log_uniform;
using effdim::testing::random_dim;
using effdim::testing::random_matrix;
using effdim::testing::random_spd;
using effdim::testing::rel_diff;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

GaussianChannel random_channel(std::mt19937_64& rng, int max_dim) {
  const auto p = random_dim(rng, 1, max_dim);
  const auto n = random_dim(rng, 1, max_dim);
  return GaussianChannel(random_matrix(rng, n, p), random_spd(rng, p), random_spd(rng, n));
}

std::vector<double> random_spectrum(std::mt19937_64& rng) {
  std::vector<double> s2(static_cast<std::size_t>(random_dim(rng, 1, 10)));
  for (auto& v : s2) v = log_uniform(rng, 1e-3, 1e3);
  std::sort(s2.begin(), s2.end(), std::greater<>());
  return s2;
}

Outcome closed_form_vs_oracle() {
  std::mt19937_64 rng(101);
  int inside = 0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const GaussianChannel ch = random_channel(rng, 6);
    const McEstimate e = estimate_channel_mi(ch, 1000000, 1000 + t);
    const double z = std::abs(e.estimate - mutual_information(ch)) / e.std_error;
    worst = std::max(worst, z);
    inside += z <= 3.0;
  }
  return {inside == 20, std::to_string(inside) + "/20 within 3 SE, max |z| " + fmt("%.2f", worst)};
}

Outcome sylvester_identity() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const GaussianChannel ch = random_channel(rng, 8);
    worst = std::max(worst, rel_diff(mutual_information(ch, DeterminantForm::kObservation),
                                     mutual_information(ch, DeterminantForm::kParameter)));
  }
  return {worst <= 1e-9, "max rel diff " + fmt("%.2e", worst)};
}

Outcome scalar_location() {
  const double mi = location_mi({1, 1.0, 1.0, 100});
  const double err = std::abs(mi - 0.5 * std::log(101.0));
  const GaussianChannel ch(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Constant(1, 1, 0.01));
  const McEstimate e = estimate_channel_mi(ch, 1000000, 103);
  const double z = std::abs(e.estimate - mi) / e.std_error;
  return {err <= 1e-12 && z <= 3.0, "abs err " + fmt("%.1e", err) + ", oracle |z| " + fmt("%.2f", z)};
}

Outcome sandwich() {
  std::mt19937_64 rng(104);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const Sandwich s = mi_df_sandwich(random_spectrum(rng), log_uniform(rng, 1e-6, 1e6));
    violations += !(s.lower <= s.mid && s.mid <= s.upper);
  }
  return {violations == 0, std::to_string(violations) + " violations in 1000"};
}

Outcome decomposition() {
  std::mt19937_64 rng(105);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto s2 = random_spectrum(rng);
    const double snr = log_uniform(rng, 1e-3, 1e3);
    DesignSpectrum spec;
    spec.singular_values_sq = s2;
    for (double v : s2) spec.singular_values.push_back(std::sqrt(v));
    spec.rank = static_cast<int>(s2.size());
    const double lhs = regression_mi(spec, snr).mi_nats;
    const double rhs = 0.5 * std::log1p(snr * s2[0]) * info_effective_rank(s2, snr);
    worst = std::max(worst, rel_diff(lhs, rhs));
  }
  return {worst <= 1e-10, "max rel diff " + fmt("%.2e", worst)};
}

Outcome dual_path() {
  std::mt19937_64 rng(106);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const RidgeModel m{random_matrix(rng, random_dim(rng, 1, 8), random_dim(rng, 1, 6)),
                       log_uniform(rng, 0.1, 10.0), log_uniform(rng, 0.1, 10.0)};
    worst = std::max(worst, rel_diff(conjugate_regression_info(m), regression_mi(m).mi_nats));
  }
  return {worst <= 1e-9, "max rel diff " + fmt("%.2e", worst)};
}

Outcome covariance_inflation() {
  std::mt19937_64 rng(107);
  int kl_violations = 0;
  int logdet_violations = 0;
  int not_dominating = 0;
  for (int t = 0; t < 500; ++t) {
    const auto p = random_dim(rng, 1, 5);
    const Matrix prior = random_spd(rng, p);
    const Matrix exact = random_spd(rng, p);
    const Matrix g = random_matrix(rng, p, random_dim(rng, 1, static_cast<int>(p)));
    const Matrix approx = exact + g * g.transpose();
    const ApproxAuditReport r = audit_approximation(GaussianDistribution(Vector::Zero(p), exact),
                                                    GaussianDistribution(Vector::Zero(p), approx), prior, 100);
    kl_violations += !(r.kl_approx <= r.kl_exact);
    logdet_violations += !(r.logdet_approx >= r.logdet_exact);
    not_dominating += !r.loewner_dominates;
  }
  const ApproxAuditReport worked = audit_approximation(
      GaussianDistribution(Vector::Zero(1), Matrix::Constant(1, 1, 0.5)),
      GaussianDistribution(Vector::Zero(1), Matrix::Ones(1, 1)), Matrix::Ones(1, 1), 10);
  const bool worked_ok = std::abs(worked.kl_exact - 0.096574) <= 5e-7 && worked.kl_approx == 0.0 &&
                         worked.loewner_dominates;
  return {kl_violations == 0 && logdet_violations == 0 && not_dominating == 0 && worked_ok,
          "kl order violated in " + std::to_string(kl_violations) + "/500, logdet order violated in " +
              std::to_string(logdet_violations) + "/500, worked case kl " + fmt("%.6f", worked.kl_exact) +
              " vs " + fmt("%.6f", worked.kl_approx)};
}

Outcome data_processing() {
  std::mt19937_64 rng(108);
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const GaussianChannel ch = random_channel(rng, 6);
    const auto k = random_dim(rng, 1, static_cast<int>(ch.n_obs()));
    const GaussianChannel coarse = coarsen(ch, random_matrix(rng, k, ch.n_obs()));
    violations += !(mutual_information(coarse) <= mutual_information(ch) + 1e-10);
  }
  return {violations == 0, std::to_string(violations) + " violations in 100"};
}

Outcome reparameterization() {
  std::mt19937_64 rng(109);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const GaussianChannel ch = random_channel(rng, 6);
    Matrix map = random_matrix(rng, ch.dim(), ch.dim());
    map.diagonal().array() += 3.0;
    worst = std::max(worst, rel_diff(mutual_information(reparameterize(ch, map)), mutual_information(ch)));
  }
  return {worst <= 1e-9, "max rel change " + fmt("%.2e", worst)};
}

Outcome half_cauchy_log_moment() {
  const ScalarShrinkageModel m{ShrinkagePrior::half_cauchy(1.0), 1.0, 1};
  McEstimate e = expected_conditional_mi(m, 1000000, 110);
  const double est = 2.0 * e.estimate;
  const double se = 2.0 * e.std_error;
  const double bound = heavy_tail_bound(*m.prior.tail_certificate(), 1.0);
  const double z = std::abs(est - 2.0 * std::log(2.0)) / se;
  return {z <= 3.0 && est <= bound,
          "estimate " + fmt("%.6f", est) + " (|z| " + fmt("%.2f", z) + "), bound " + fmt("%.7f", bound)};
}

Outcome jensen() {
  std::string detail;
  bool ok = true;
  for (double c : {0.1, 1.0, 10.0, 100.0}) {
    const ScalarShrinkageModel m{ShrinkagePrior::student_t(4.0, 1.0), 1.0 / c, 1};
    const McEstimate e = expected_conditional_mi(m, 1000000, 111);
    const double est = 2.0 * e.estimate;
    const double bound = std::log1p(2.0 * c);
    ok = ok && est <= bound + 3.0 * 2.0 * e.std_error;
    detail += "c=" + fmt("%g", c) + ": " + fmt("%.4f", est) + "<=" + fmt("%.4f", bound) + " ";
  }
  return {ok, detail};
}

Outcome chain_bound() {
  const ShrinkagePrior priors[] = {ShrinkagePrior::fixed(1.0), ShrinkagePrior::student_t(4.0, 1.0),
                                   ShrinkagePrior::half_cauchy(1.0)};
  int satisfied = 0;
  int runs = 0;
  for (const auto& p : priors) {
    for (double c : {1.0, 10.0}) {
      const ScalarShrinkageModel m{p, 1.0 / c, 1};
      satisfied += chain_decomposition(m, 30000, 30000, 112, 1).bound_satisfied;
      ++runs;
    }
  }
  return {satisfied == runs, std::to_string(satisfied) + "/" + std::to_string(runs) + " runs satisfied"};
}

Outcome infinite_spectrum() {
  const SequenceMi r = spectrum_sequence_mi({1.0, 1.0, 1e-6});
  double brute = 0.0;
  for (std::int64_t j = 10000000; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    brute += std::log1p(1.0 / (jd * jd));
  }
  brute *= 0.5;
  const double diff = std::abs(r.mi_nats - brute);
  double prev = 1e300;
  bool decreasing = true;
  std::string curve;
  for (std::int64_t n : {100, 10000, 1000000}) {
    const double d = deff(r.mi_nats, n);
    decreasing = decreasing && d < prev;
    prev = d;
    curve += fmt("%.5f", d) + " ";
  }
  return {diff <= 1e-6 && decreasing, "abs diff " + fmt("%.2e", diff) + ", d_eff " + curve};
}

struct CliRun {
  int code;
  std::string out;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

Outcome determinism() {
  const std::string g = EFFDIM_GOLDEN_DIR;
  const std::vector<std::vector<std::string>> commands = {
      {"location", "--d", "2", "--n", "50", "--oracle", "--seed", "7", "--samples", "40000"},
      {"regression", "--design", g + "/design_6x4.csv", "--oracle", "--seed", "7", "--samples", "40000"},
      {"shrinkage", "--prior", "half-cauchy", "--n", "100", "--seed", "7", "--samples", "40000",
       "--decompose", "--inner-samples", "10000"},
      {"shrinkage", "--prior", "student-t", "--n", "100", "--seed", "7", "--samples", "40000"},
      {"oracle", "--model", "regression", "--design", g + "/design_6x4.csv", "--seed", "7", "--samples",
       "40000"},
      {"oracle", "--model", "kl", "--cov", g + "/cov_half.csv", "--prior-cov", g + "/cov_one.csv", "--seed",
       "7", "--samples", "40000"},
  };
  int identical = 0;
  for (auto args : commands) {
    args.insert(args.end(), {"--threads", "1"});
    const CliRun a = run(args);
    const CliRun b = run(args);
    args.back() = "8";
    const CliRun c = run(args);
    identical += a.code == 0 && a.out == b.out && a.out == c.out;
  }
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) +
              " commands byte-identical across reruns and thread counts"};
}

std::vector<std::string> read_args(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> args;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) args.push_back(line);
  }
  return args;
}

Outcome golden_files() {
  const std::filesystem::path dir = EFFDIM_GOLDEN_DIR;
  const auto previous = std::filesystem::current_path();
  std::filesystem::current_path(dir);
  int matched = 0;
  std::string missing;
  const char* names[] = {"location", "regression", "approx"};
  for (const char* name : names) {
    std::ifstream expected_in(dir / (std::string(name) + ".expected.json"), std::ios::binary);
    std::stringstream expected;
    expected << expected_in.rdbuf();
    const CliRun r = run(read_args(dir / (std::string(name) + ".args")));
    if (r.code == 0 && !expected.str().empty() && r.out == expected.str()) ++matched;
    else missing += std::string(" ") + name;
  }
  std::filesystem::current_path(previous);
  return {matched == 3, std::to_string(matched) + "/3 reports match" + (missing.empty() ? "" : ", differ:" + missing)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
    double time_limit_s;  // 0 means unbounded
  };
  const std::vector<Criterion> criteria = {
      {"closed-form MI vs Monte Carlo oracle, 20 channels", closed_form_vs_oracle, 120.0},
      {"observation-form vs parameter-form log-det, 200 channels", sylvester_identity, 1.0},
      {"scalar location exactness and oracle", scalar_location, 0.0},
      {"df <= 2 MI <= snr tr(X^T X), 1000 spectra", sandwich, 1.0},
      {"MI = leading-mode MI times information rank, 200 spectra", decomposition, 0.0},
      {"conjugate expected KL equals regression MI, 100 designs", dual_path, 0.0},
      {"covariance inflation lowers KL and raises log-det, 500 instances", covariance_inflation, 0.0},
      {"coarsening never adds information, 100 pairs", data_processing, 0.0},
      {"linear reparameterization invariance, 100 maps", reparameterization, 0.0},
      {"half-Cauchy log-moment vs quadrature value and tail bound", half_cauchy_log_moment, 30.0},
      {"Student-t log-moment below Jensen bound", jensen, 0.0},
      {"chain-rule bound with nested estimator", chain_bound, 300.0},
      {"infinite spectrum sum and decreasing d_eff", infinite_spectrum, 0.0},
      {"MC subcommands deterministic", determinism, 0.0},
      {"CLI golden reports", golden_files, 0.0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = criteria[i].time_limit_s == 0.0 || secs <= criteria[i].time_limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %2zu %s: %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs, in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
