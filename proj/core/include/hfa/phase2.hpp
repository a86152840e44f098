#pragma once

// Trend models over per-conference, per-year HFA estimates. Each estimate
// carries its standard error w, and errors are modelled as
// eps_ij ~ N(0, sigma2_lambda * w_ij^2). Time is coded t = year - time_origin.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hfa {

struct HfaRow {
  int year = 0;
  std::string conference;
  double lambda_hat = 0.0;
  double se = 0.0;
};

struct HfaSeries {
  std::vector<HfaRow> rows;

  /// Throws when an se is not positive and finite or a (year, conference) pair repeats.
  void validate() const;
  std::vector<std::string> conferences() const;  // sorted, unique
  std::size_t distinct_years() const;
};

/// Reads `year,conference,lambda_hat,se[,model]`. When the optional `model`
/// column is present and `model_filter` is set, only matching rows are kept.
HfaSeries parse_hfa_series(std::istream& in, const std::optional<std::string>& model_filter = {});
HfaSeries parse_hfa_series_file(const std::string& path,
                                const std::optional<std::string>& model_filter = {});

struct Coefficient {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double ci_lower = 0.0;  // normal quantiles
  double ci_upper = 0.0;
  double p_value = 1.0;   // Wald z-test of estimate = 0
};

struct ConferenceBlup {
  std::string conference;
  double intercept = 0.0;  // b0j
  double slope = 0.0;      // b1j
};

/// lambda_ij = (alpha0 + b0j) + (alpha1 + b1j) t_i + eps_ij, (b0j, b1j) ~ N(0, G).
struct RandomCoefFit {
  Coefficient alpha0;
  Coefficient alpha1;
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();  // (sigma1^2, sigma12; sigma12, sigma2^2)
  double sigma2_lambda = 0.0;
  std::vector<ConferenceBlup> blups;
  double reml_loglik = 0.0;
  double reml_loglik_g0 = 0.0;  // same data, G = 0
  int time_origin = 2017;
  int n_obs = 0;
  bool converged = false;
  bool exact_fit = false;  // residuals vanish; variance components are zero
};

struct Phase2Options {
  int time_origin = 2017;
};

/// REML fit with G = L L' in log-Cholesky form, optimised by quasi-Newton on the
/// objective with sigma2_lambda profiled out. Needs >= 3 conferences and >= 3 years.
RandomCoefFit fit_random_coefficient(const HfaSeries& series, const Phase2Options& options = {});

enum class TrendModel {
  full,          // b0A + b1A t + (b0B + b1B t) I(j = B)
  common_trend,  // b0A + b1A t
  no_trend       // b0A + b0B I(j = B)
};

const char* to_string(TrendModel model);
std::optional<TrendModel> trend_model_from_string(const std::string& name);

struct FixedTrendFit {
  TrendModel model = TrendModel::full;
  std::vector<Coefficient> coefficients;  // subset of beta0A, beta1A, beta0B, beta1B
  double sigma2_lambda = 0.0;             // REML (RSS / (n - p))
  double loglik_ml = 0.0;
  double reml_loglik = 0.0;
  int n_obs = 0;
  std::string conference_a;
  std::string conference_b;
  std::uint64_t data_fingerprint = 0;

  const Coefficient* find(const std::string& name) const;
};

/// Weighted least squares with weights 1 / se^2. `full` and `no_trend` need
/// exactly two conferences; A is `reference` or the lexicographically first.
FixedTrendFit fit_fixed_trend(const HfaSeries& series, TrendModel model,
                              const std::optional<std::string>& reference = {},
                              const Phase2Options& options = {});

struct LrtResult {
  double stat = 0.0;
  int dof = 0;
  double p = 1.0;
};

/// 2 (l_full - l_reduced) on ML log-likelihoods against chi-square(dof).
LrtResult lrt(const FixedTrendFit& full, const FixedTrendFit& reduced);

struct BoundaryTestResult {
  double p = 1.0;
  double observed_stat = 0.0;
  int n_sim = 0;
  int failures = 0;
};

/// Parametric bootstrap of 2 (REML l_G - REML l_{G=0}) under the fitted G = 0
/// model. p = (1 + #{null >= observed}) / (n_sim + 1).
BoundaryTestResult boundary_test_G(const HfaSeries& series, int n_sim, std::uint64_t seed,
                                   unsigned threads = 1, const Phase2Options& options = {});

/// Fitted value of each conference's line at each year present in the series.
struct FittedPoint {
  std::string conference;
  int year = 0;
  double observed = 0.0;
  double fitted = 0.0;
};

std::vector<FittedPoint> fitted_lines(const HfaSeries& series, const RandomCoefFit& fit);
std::vector<FittedPoint> fitted_lines(const HfaSeries& series, const FixedTrendFit& fit,
                                      const Phase2Options& options = {});

}  // namespace hfa
