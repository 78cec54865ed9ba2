#include "effdim/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "effdim/csv.hpp"
#include "effdim/effective_dimension.hpp"
#include "effdim/gaussian_channel.hpp"
#include "effdim/mc_oracle.hpp"
#include "effdim/posterior_approx.hpp"
#include "effdim/report.hpp"
#include "effdim/shrinkage.hpp"

namespace effdim::cli {
namespace {

using report::Json;
using report::tagged;

struct RunConfig {
  std::string out_path;
  std::string format;
  std::string seed_text;
  std::int64_t samples = 100000;
  std::int64_t inner_samples = 100000;
  int threads = 1;

  int d = 1;
  double tau2 = 1.0;
  double sigma2 = 1.0;
  std::int64_t n = 0;
  bool oracle = false;

  std::string design_path;

  std::string model = "location";
  std::string grid_text;
  std::string tau2_schedule = "constant";

  std::string exact_cov_path;
  std::string approx_cov_path;
  std::string prior_cov_path;
  std::string exact_mean_path;
  std::string approx_mean_path;
  bool use_dominating_diagonal = false;
  bool require_domination = false;

  std::string prior = "half-cauchy";
  double tau = 1.0;
  double nu = 4.0;
  double s2 = 1.0;
  double tau_g = 1.0;
  std::string table_path;
  bool decompose = false;

  std::string a_path;
  std::string noise_cov_path;
  std::string mean_path;
  std::string cov_path;
};

std::uint64_t parse_seed(const std::string& text, const char* source) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("invalid seed from ") + source + ": '" + text + "'");
  }
  return value;
}

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (!cfg.seed_text.empty()) return parse_seed(cfg.seed_text, "--seed");
  if (const char* env = std::getenv("EFFDIM_SEED")) return parse_seed(env, "EFFDIM_SEED");
  throw Error(ErrorCode::kInvalidArgument, "Monte Carlo runs need a seed (--seed or EFFDIM_SEED)");
}

void require_sample_size(std::int64_t n) {
  if (n < 3) {
    throw Error(ErrorCode::kSampleSizeTooSmall, "effective dimension needs n >= 3, got " + std::to_string(n));
  }
}

Vector read_vector(const std::string& path) {
  const Matrix m = csv::read_matrix(path);
  if (m.rows() != 1 && m.cols() != 1) {
    throw Error(ErrorCode::kParseError, path + ": expected a single row or column");
  }
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Json oracle_block(double closed_form, const McEstimate& mc) {
  Json j;
  j["closed_form"] = tagged(closed_form, report::kClosedForm);
  j["estimate"] = report::estimate(mc);
  const double z = mc.std_error > 0.0 ? (mc.estimate - closed_form) / mc.std_error
                                      : (mc.estimate == closed_form ? 0.0 : std::nan(""));
  j["z_score"] = tagged(z, report::kMonteCarlo);
  j["within_3se"] = std::abs(mc.estimate - closed_form) <= 3.0 * mc.std_error;
  return j;
}

struct Output {
  Json json;
  std::string csv;  // set when the command emits a native CSV table
  int exit_code = kOk;
};

Output cmd_location(const RunConfig& cfg) {
  const LocationModel model{cfg.d, cfg.tau2, cfg.sigma2, cfg.n};
  model.validate();
  require_sample_size(cfg.n);
  const double mi = location_mi(model);

  Output o;
  Json& j = o.json;
  j["command"] = "location";
  j["config"] = {{"d", cfg.d}, {"tau2", cfg.tau2}, {"sigma2", cfg.sigma2}, {"n", cfg.n}};
  j["result"]["mi_nats"] = tagged(mi, report::kClosedForm);
  j["result"]["d_eff"] = tagged(deff(mi, cfg.n), report::kClosedForm);
  if (cfg.oracle) {
    const std::uint64_t seed = resolve_seed(cfg);
    const auto d = static_cast<Eigen::Index>(cfg.d);
    // Experiment reduced to the sufficient statistic (the sample mean).
    const GaussianChannel ch(Matrix::Identity(d, d), cfg.tau2 * Matrix::Identity(d, d),
                             cfg.sigma2 / static_cast<double>(cfg.n) * Matrix::Identity(d, d));
    j["oracle"] = oracle_block(mi, estimate_channel_mi(ch, cfg.samples, seed, cfg.threads));
  }
  return o;
}

Output cmd_regression(const RunConfig& cfg) {
  const RidgeModel model{csv::read_matrix(cfg.design_path), cfg.sigma2, cfg.tau2};
  model.validate();
  const std::int64_t n = cfg.n > 0 ? cfg.n : static_cast<std::int64_t>(model.design.rows());
  const InfoReport r = regression_report(model, n);

  Output o;
  Json& j = o.json;
  j["command"] = "regression";
  j["config"] = {{"design", cfg.design_path},
                 {"n_obs", model.design.rows()},
                 {"p", model.design.cols()},
                 {"tau2", cfg.tau2},
                 {"sigma2", cfg.sigma2},
                 {"n", n}};
  Json& res = j["result"];
  res["mi_nats"] = tagged(r.mi_nats, report::kClosedForm);
  res["d_eff"] = tagged(r.d_eff, report::kClosedForm);
  res["df"] = r.df ? tagged(*r.df, report::kClosedForm) : Json();
  res["r_info"] = r.r_info ? tagged(*r.r_info, report::kClosedForm) : Json();
  res["sandwich"]["lower"] = tagged(r.sandwich_lower, report::kBound);
  res["sandwich"]["mid"] = tagged(2.0 * r.mi_nats, report::kClosedForm);
  res["sandwich"]["upper"] = tagged(r.sandwich_upper, report::kBound);
  res["rank"] = report::tagged_count(r.rank, report::kClosedForm);
  res["deff_rank_bound"] = tagged(r.rank_bound, report::kBound);
  res["singular_values"] = tagged(r.singular_values, report::kClosedForm);

  const Eigen::Index p = model.design.cols();
  const Eigen::Index n_obs = model.design.rows();
  const GaussianChannel ch(model.design, cfg.tau2 * Matrix::Identity(p, p),
                           cfg.sigma2 * Matrix::Identity(n_obs, n_obs));
  Json& cross = j["cross_checks"];
  cross["channel_mi"] = tagged(mutual_information(ch), report::kClosedForm);
  cross["conjugate_expected_kl"] =
      cfg.tau2 > 0.0 ? tagged(conjugate_regression_info(model), report::kClosedForm) : Json();
  if (cfg.oracle) {
    const std::uint64_t seed = resolve_seed(cfg);
    j["oracle"] = oracle_block(r.mi_nats, estimate_channel_mi(ch, cfg.samples, seed, cfg.threads));
  }
  return o;
}

// "constant" or "n^<k>": tau2_n = tau2 * n^k.
std::optional<double> parse_schedule(const std::string& text) {
  if (text == "constant") return std::nullopt;
  if (text.rfind("n^", 0) == 0) {
    const std::string rest = text.substr(2);
    double k = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    if (!rest.empty() && ec == std::errc() && ptr == rest.data() + rest.size()) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "tau2 schedule must be 'constant' or 'n^<k>', got '" + text + "'");
}

Output cmd_curve(const RunConfig& cfg) {
  const std::vector<std::int64_t> grid = csv::parse_int_list(cfg.grid_text);
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty n grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_sample_size(grid[i]);
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "n grid must be strictly increasing");
    }
  }
  const std::optional<double> exponent = parse_schedule(cfg.tau2_schedule);
  if (cfg.model != "location" && cfg.model != "regression") {
    throw Error(ErrorCode::kInvalidArgument, "curve model must be 'location' or 'regression'");
  }
  std::optional<DesignSpectrum> spectrum;
  if (cfg.model == "regression") {
    RidgeModel model{csv::read_matrix(cfg.design_path), cfg.sigma2, cfg.tau2};
    model.validate();
    spectrum = design_spectrum(model.design);
  }

  Output o;
  Json& j = o.json;
  j["command"] = "curve";
  j["config"] = {{"model", cfg.model},
                 {"d", cfg.d},
                 {"tau2", cfg.tau2},
                 {"sigma2", cfg.sigma2},
                 {"tau2_schedule", cfg.tau2_schedule},
                 {"grid", grid}};
  if (spectrum) j["config"]["design"] = cfg.design_path;

  std::ostringstream table;
  table << "n,tau2,mi_nats,d_eff\n";
  Json rows = Json::array();
  std::vector<double> mi_column;
  std::vector<double> deff_column;
  for (const std::int64_t n : grid) {
    const double tau2_n = exponent ? cfg.tau2 * std::pow(static_cast<double>(n), *exponent) : cfg.tau2;
    double mi = 0.0;
    if (spectrum) {
      mi = regression_mi(*spectrum, tau2_n / cfg.sigma2).mi_nats;
    } else {
      mi = location_mi(LocationModel{cfg.d, tau2_n, cfg.sigma2, n});
    }
    const double d_eff = deff(mi, n);
    mi_column.push_back(mi);
    deff_column.push_back(d_eff);
    table << n << ',' << csv::format_double(tau2_n) << ',' << csv::format_double(mi) << ','
          << csv::format_double(d_eff) << '\n';
    Json row;
    row["n"] = n;
    row["tau2"] = tagged(tau2_n, report::kClosedForm);
    row["mi_nats"] = tagged(mi, report::kClosedForm);
    row["d_eff"] = tagged(d_eff, report::kClosedForm);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);

  // Guaranteed shapes: with a constant prior scale the location MI grows
  // with n, and the regression MI does not depend on n so d_eff falls.
  if (!exponent) {
    bool ok = true;
    std::string what;
    if (spectrum) {
      what = "d_eff_nonincreasing";
      for (std::size_t i = 1; i < deff_column.size(); ++i) ok = ok && deff_column[i] <= deff_column[i - 1];
    } else {
      what = "mi_nondecreasing";
      for (std::size_t i = 1; i < mi_column.size(); ++i) ok = ok && mi_column[i] >= mi_column[i - 1];
    }
    j["checks"][what] = ok;
    if (!ok) o.exit_code = kNumericalFailure;
  }
  o.csv = table.str();
  return o;
}

Output cmd_approx(const RunConfig& cfg) {
  const Matrix prior_cov = csv::read_matrix(cfg.prior_cov_path);
  const Matrix exact_cov = csv::read_matrix(cfg.exact_cov_path);
  const Eigen::Index p = exact_cov.rows();
  if (exact_cov.cols() != p || prior_cov.rows() != p || prior_cov.cols() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "covariances must be square and of equal size");
  }
  std::optional<DominatingDiagonal> inflated;
  Matrix approx_cov;
  if (cfg.use_dominating_diagonal) {
    inflated = dominating_diagonal(exact_cov);
    approx_cov = inflated->cov;
  } else {
    if (cfg.approx_cov_path.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--approx-cov or --dominating-diagonal is required");
    }
    approx_cov = csv::read_matrix(cfg.approx_cov_path);
  }
  const Vector exact_mean = cfg.exact_mean_path.empty() ? Vector::Zero(p) : read_vector(cfg.exact_mean_path);
  const Vector approx_mean = cfg.approx_mean_path.empty() ? exact_mean : read_vector(cfg.approx_mean_path);
  const ApproxAuditReport r = audit_approximation(GaussianDistribution(exact_mean, exact_cov),
                                                  GaussianDistribution(approx_mean, approx_cov),
                                                  prior_cov, cfg.n);

  Output o;
  Json& j = o.json;
  j["command"] = "approx";
  j["config"] = {{"exact_cov", cfg.exact_cov_path},
                 {"approx_cov", cfg.use_dominating_diagonal ? std::string("dominating-diagonal")
                                                            : cfg.approx_cov_path},
                 {"prior_cov", cfg.prior_cov_path},
                 {"exact_mean", cfg.exact_mean_path},
                 {"approx_mean", cfg.approx_mean_path},
                 {"n", cfg.n},
                 {"p", p}};
  Json& res = j["result"];
  res["kl_exact"] = tagged(r.kl_exact, report::kClosedForm);
  res["kl_approx"] = tagged(r.kl_approx, report::kClosedForm);
  res["logdet_exact"] = tagged(r.logdet_exact, report::kClosedForm);
  res["logdet_approx"] = tagged(r.logdet_approx, report::kClosedForm);
  res["deff_exact"] = tagged(r.deff_exact, report::kClosedForm);
  res["deff_approx"] = tagged(r.deff_approx, report::kClosedForm);
  res["loewner_dominates"] = r.loewner_dominates;
  res["means_equal"] = r.means_equal;
  res["logdet_order_guaranteed"] = r.logdet_order_guaranteed;
  res["within_prior"] = r.within_prior;
  res["kl_order_guaranteed"] = r.kl_order_guaranteed;
  res["kl_order_holds"] = r.kl_order_holds;
  if (inflated) res["inflation_multiplier"] = tagged(inflated->multiplier, report::kClosedForm);
  if (cfg.require_domination && !r.loewner_dominates) o.exit_code = kContractViolation;
  return o;
}

ShrinkagePrior make_prior(const RunConfig& cfg) {
  if (cfg.prior == "fixed") return ShrinkagePrior::fixed(cfg.tau);
  if (cfg.prior == "student-t") return ShrinkagePrior::student_t(cfg.nu, cfg.s2);
  if (cfg.prior == "half-cauchy") return ShrinkagePrior::half_cauchy(cfg.tau_g);
  if (cfg.prior == "table") {
    const Matrix m = csv::read_matrix(cfg.table_path);
    return ShrinkagePrior::tabulated(std::vector<double>(m.data(), m.data() + m.size()));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "prior must be one of fixed, student-t, half-cauchy, table; got '" + cfg.prior + "'");
}

Output cmd_shrinkage(const RunConfig& cfg) {
  const ScalarShrinkageModel model{make_prior(cfg), cfg.sigma2, cfg.n};
  model.validate();
  require_sample_size(cfg.n);
  const std::uint64_t seed = resolve_seed(cfg);
  const double c = model.c_snr();

  Output o;
  Json& j = o.json;
  j["command"] = "shrinkage";
  Json config;
  config["prior"] = model.prior.name();
  if (cfg.prior == "fixed") config["tau"] = cfg.tau;
  if (cfg.prior == "student-t") {
    config["nu"] = cfg.nu;
    config["s2"] = cfg.s2;
  }
  if (cfg.prior == "half-cauchy") config["tau_g"] = cfg.tau_g;
  if (cfg.prior == "table") config["table"] = cfg.table_path;
  config["sigma2"] = cfg.sigma2;
  config["n"] = cfg.n;
  config["samples"] = cfg.samples;
  config["seed"] = seed;
  if (cfg.decompose) config["inner_samples"] = cfg.inner_samples;
  if (const auto cert = model.prior.tail_certificate()) {
    config["tail_certificate"] = {{"c_const", cert->c_const}, {"alpha", cert->alpha_exp}, {"t0", cert->t0}};
  }
  j["config"] = std::move(config);

  Json& res = j["result"];
  res["c_snr"] = tagged(c, report::kClosedForm);

  const DeffSummary s = random_deff_distribution(model, cfg.samples, seed, cfg.threads);
  Json dist;
  dist["mean"] = tagged(s.mean, report::kMonteCarlo);
  dist["std_error"] = tagged(s.std_error, report::kMonteCarlo);
  dist["sd"] = tagged(s.sd, report::kMonteCarlo);
  dist["q05"] = tagged(s.q05, report::kMonteCarlo);
  dist["q25"] = tagged(s.q25, report::kMonteCarlo);
  dist["q50"] = tagged(s.q50, report::kMonteCarlo);
  dist["q75"] = tagged(s.q75, report::kMonteCarlo);
  dist["q95"] = tagged(s.q95, report::kMonteCarlo);
  dist["n_samples"] = s.n_samples;
  dist["seed"] = s.seed;
  res["random_deff"] = std::move(dist);

  const McEstimate cond = expected_conditional_mi(model, cfg.samples, seed, cfg.threads);
  res["expected_conditional_mi"] =
      model.prior.is_degenerate() ? tagged(cond.estimate, report::kClosedForm) : report::estimate(cond);
  const auto jensen = jensen_bound(model);
  res["jensen_bound"] = jensen ? tagged(*jensen, report::kBound) : Json();

  Json log_moment;
  McEstimate doubled = cond;
  doubled.estimate *= 2.0;
  doubled.std_error *= 2.0;
  log_moment["estimate"] =
      model.prior.is_degenerate() ? tagged(doubled.estimate, report::kClosedForm) : report::estimate(doubled);
  log_moment["jensen_bound"] = jensen ? tagged(2.0 * *jensen, report::kBound) : Json();
  if (const auto cert = model.prior.tail_certificate()) {
    log_moment["heavy_tail_bound"] = tagged(heavy_tail_bound(*cert, c), report::kBound);
  } else {
    log_moment["heavy_tail_bound"] = Json();
  }
  res["log_moment"] = std::move(log_moment);

  if (cfg.decompose) {
    const ChainDecomposition d = chain_decomposition(model, cfg.samples, cfg.inner_samples, seed, cfg.threads);
    Json block;
    block["i_theta_y"] = report::estimate(d.i_theta_y);
    block["i_lambda_y"] = report::estimate(d.i_lambda_y);
    block["e_cond_mi"] = report::estimate(d.e_cond_mi);
    block["pooled_se"] = tagged(d.pooled_se, report::kMonteCarlo);
    block["bias_allowance"] = tagged(kNestedBiasAllowance, report::kBound);
    block["bound_satisfied"] = d.bound_satisfied;
    res["decomposition"] = std::move(block);
  }
  return o;
}

Output cmd_oracle(const RunConfig& cfg) {
  const std::uint64_t seed = resolve_seed(cfg);
  Output o;
  Json& j = o.json;
  j["command"] = "oracle";
  if (cfg.model == "channel") {
    const GaussianChannel ch(csv::read_matrix(cfg.a_path), csv::read_matrix(cfg.prior_cov_path),
                             csv::read_matrix(cfg.noise_cov_path));
    j["config"] = {{"model", "channel"}, {"a", cfg.a_path}, {"prior_cov", cfg.prior_cov_path},
                   {"noise_cov", cfg.noise_cov_path}, {"samples", cfg.samples}, {"seed", seed}};
    j["result"] = oracle_block(mutual_information(ch), estimate_channel_mi(ch, cfg.samples, seed, cfg.threads));
  } else if (cfg.model == "location") {
    const LocationModel model{cfg.d, cfg.tau2, cfg.sigma2, cfg.n};
    model.validate();
    const auto d = static_cast<Eigen::Index>(cfg.d);
    const GaussianChannel ch(Matrix::Identity(d, d), cfg.tau2 * Matrix::Identity(d, d),
                             cfg.sigma2 / static_cast<double>(cfg.n) * Matrix::Identity(d, d));
    j["config"] = {{"model", "location"}, {"d", cfg.d}, {"tau2", cfg.tau2}, {"sigma2", cfg.sigma2},
                   {"n", cfg.n}, {"samples", cfg.samples}, {"seed", seed}};
    j["result"] = oracle_block(location_mi(model), estimate_channel_mi(ch, cfg.samples, seed, cfg.threads));
  } else if (cfg.model == "regression") {
    const RidgeModel model{csv::read_matrix(cfg.design_path), cfg.sigma2, cfg.tau2};
    model.validate();
    const Eigen::Index p = model.design.cols();
    const Eigen::Index n_obs = model.design.rows();
    const GaussianChannel ch(model.design, cfg.tau2 * Matrix::Identity(p, p),
                             cfg.sigma2 * Matrix::Identity(n_obs, n_obs));
    j["config"] = {{"model", "regression"}, {"design", cfg.design_path}, {"tau2", cfg.tau2},
                   {"sigma2", cfg.sigma2}, {"samples", cfg.samples}, {"seed", seed}};
    j["result"] = oracle_block(regression_mi(model).mi_nats, estimate_channel_mi(ch, cfg.samples, seed, cfg.threads));
  } else if (cfg.model == "kl") {
    const Matrix cov = csv::read_matrix(cfg.cov_path);
    const Vector mean = cfg.mean_path.empty() ? Vector::Zero(cov.rows()) : read_vector(cfg.mean_path);
    const GaussianDistribution q(mean, cov);
    const Matrix prior_cov = csv::read_matrix(cfg.prior_cov_path);
    j["config"] = {{"model", "kl"}, {"mean", cfg.mean_path}, {"cov", cfg.cov_path},
                   {"prior_cov", cfg.prior_cov_path}, {"samples", cfg.samples}, {"seed", seed}};
    j["result"] = oracle_block(gaussian_kl(q, prior_cov),
                               estimate_gaussian_kl(q, prior_cov, cfg.samples, seed, cfg.threads));
  } else {
    throw Error(ErrorCode::kInvalidArgument, "oracle model must be channel, location, regression or kl");
  }
  return o;
}

void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--out", cfg.out_path, "Write the report to this file instead of stdout");
  sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_mc_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed_text, "Master seed (falls back to EFFDIM_SEED)");
  sub->add_option("--samples", cfg.samples, "Monte Carlo sample count");
  sub->add_option("--threads", cfg.threads, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1, 1024));
}

void add_model_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--tau2", cfg.tau2, "Prior variance tau^2");
  sub->add_option("--sigma2", cfg.sigma2, "Noise variance sigma^2");
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotPositiveDefinite:
    case ErrorCode::kNotPositiveSemidefinite:
    case ErrorCode::kRankDeficientCoarsening:
    case ErrorCode::kSingularReparameterization:
      return kNumericalFailure;
    default:
      return kInputError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Bayesian effective dimension and information functionals", "effdim"};
  app.require_subcommand(1);

  auto* location = app.add_subcommand("location", "Gaussian location model");
  location->add_option("--d", cfg.d, "Parameter dimension");
  add_model_options(location, cfg);
  location->add_option("--n", cfg.n, "Sample size")->required();
  location->add_flag("--oracle", cfg.oracle, "Append a Monte Carlo cross-check");
  add_mc_options(location, cfg);
  add_output_options(location, cfg);

  auto* regression = app.add_subcommand("regression", "Linear regression with a Gaussian prior");
  regression->add_option("--design", cfg.design_path, "Design matrix CSV")->required();
  add_model_options(regression, cfg);
  regression->add_option("--n", cfg.n, "Effective sample size (default: design rows)");
  regression->add_flag("--oracle", cfg.oracle, "Append a Monte Carlo cross-check");
  add_mc_options(regression, cfg);
  add_output_options(regression, cfg);

  auto* curve = app.add_subcommand("curve", "Effective dimension over a grid of sample sizes");
  curve->add_option("--model", cfg.model, "location or regression");
  curve->add_option("--grid", cfg.grid_text, "Comma-separated sample sizes")->required();
  curve->add_option("--d", cfg.d, "Parameter dimension (location)");
  curve->add_option("--design", cfg.design_path, "Design matrix CSV (regression)");
  curve->add_option("--tau2-schedule", cfg.tau2_schedule, "constant or n^<k> (tau2_n = tau2 * n^k)");
  add_model_options(curve, cfg);
  add_output_options(curve, cfg);

  auto* approx = app.add_subcommand("approx", "Audit an approximate Gaussian posterior");
  approx->add_option("--exact-cov", cfg.exact_cov_path, "Exact posterior covariance CSV")->required();
  approx->add_option("--approx-cov", cfg.approx_cov_path, "Approximate posterior covariance CSV");
  approx->add_option("--prior-cov", cfg.prior_cov_path, "Prior covariance CSV")->required();
  approx->add_option("--exact-mean", cfg.exact_mean_path, "Exact posterior mean CSV (default 0)");
  approx->add_option("--approx-mean", cfg.approx_mean_path, "Approximate mean CSV (default: exact mean)");
  approx->add_flag("--dominating-diagonal", cfg.use_dominating_diagonal,
                   "Use the smallest power-of-two inflation of diag(exact) as the approximation");
  approx->add_flag("--require-domination", cfg.require_domination,
                   "Exit 4 when the approximation does not inflate the exact covariance");
  approx->add_option("--n", cfg.n, "Sample size")->required();
  add_output_options(approx, cfg);

  auto* shrinkage = app.add_subcommand("shrinkage", "Global-local shrinkage prior diagnostics");
  shrinkage->add_option("--prior", cfg.prior, "fixed | student-t | half-cauchy | table");
  shrinkage->add_option("--tau", cfg.tau, "Scale of the fixed prior");
  shrinkage->add_option("--nu", cfg.nu, "Student-t degrees of freedom");
  shrinkage->add_option("--s2", cfg.s2, "Student-t squared scale");
  shrinkage->add_option("--tau-g", cfg.tau_g, "Half-Cauchy global scale");
  shrinkage->add_option("--table", cfg.table_path, "CSV of local scales (table prior)");
  shrinkage->add_option("--sigma2", cfg.sigma2, "Noise variance sigma^2");
  shrinkage->add_option("--n", cfg.n, "Sample size")->required();
  shrinkage->add_option("--inner-samples", cfg.inner_samples, "Inner mixture pool size (--decompose)");
  shrinkage->add_flag("--decompose", cfg.decompose, "Run the nested chain-rule decomposition");
  add_mc_options(shrinkage, cfg);
  add_output_options(shrinkage, cfg);

  auto* oracle = app.add_subcommand("oracle", "Closed form versus Monte Carlo oracle");
  oracle->add_option("--model", cfg.model, "channel | location | regression | kl")->required();
  oracle->add_option("--a", cfg.a_path, "Forward map CSV (channel)");
  oracle->add_option("--prior-cov", cfg.prior_cov_path, "Prior covariance CSV (channel, kl)");
  oracle->add_option("--noise-cov", cfg.noise_cov_path, "Noise covariance CSV (channel)");
  oracle->add_option("--design", cfg.design_path, "Design matrix CSV (regression)");
  oracle->add_option("--mean", cfg.mean_path, "Mean CSV (kl)");
  oracle->add_option("--cov", cfg.cov_path, "Covariance CSV (kl)");
  oracle->add_option("--d", cfg.d, "Parameter dimension (location)");
  oracle->add_option("--n", cfg.n, "Sample size (location)");
  add_model_options(oracle, cfg);
  add_mc_options(oracle, cfg);
  add_output_options(oracle, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    Output o;
    std::string default_format = "json";
    if (location->parsed()) o = cmd_location(cfg);
    else if (regression->parsed()) o = cmd_regression(cfg);
    else if (curve->parsed()) {
      o = cmd_curve(cfg);
      default_format = "csv";
    } else if (approx->parsed()) o = cmd_approx(cfg);
    else if (shrinkage->parsed()) o = cmd_shrinkage(cfg);
    else o = cmd_oracle(cfg);

    const std::string format = cfg.format.empty() ? default_format : cfg.format;
    std::string text;
    if (format == "json") text = report::dump(o.json);
    else text = o.csv.empty() ? report::dump_csv(o.json) : o.csv;

    if (cfg.out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out_path, std::ios::binary);
      if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + cfg.out_path + "'");
      file << text;
    }
    if (o.exit_code == kContractViolation) err << "error: approximation does not dominate the exact covariance\n";
    if (o.exit_code == kNumericalFailure) err << "error: guaranteed monotonicity check failed\n";
    return o.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace effdim::cli
