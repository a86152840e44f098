#pragma once

// Random team effects: d | eta ~ N(lambda 1 + Z eta, sigma2 I), eta ~ N(0, sigma2_g I).
//
// Variance components are REML estimates from an EM iteration on Henderson's
// mixed-model equations
//
//   [ 1'1      1'Z         ] [lambda]   [1'd]
//   [ Z'1   Z'Z + k I      ] [ eta  ] = [Z'd],     k = sigma2 / sigma2_g.
//
// MixedModelSolver diagonalises Z'Z once per schedule (Z'Z = U diag(l) U'), so
// every Henderson solve, EM step and REML evaluation afterwards costs O(N) in
// the number of teams plus O(n) for the residual norm.

#include <vector>

#include <Eigen/Dense>

#include "hfa/schedule.hpp"

namespace hfa {

enum class EmVariant {
  plain,              // Laird-Ware EM
  parameter_expanded  // PX-EM: rescales eta by a working parameter each step
};

struct EMConfig {
  int max_iter = 5000;
  double rel_tol = 1e-10;
  double loglik_tol = 1e-12;  // absolute change in REML log-likelihood
  double var_floor = 1e-12;   // fraction of var(d)
  EmVariant variant = EmVariant::plain;
};

struct MixedFit {
  double lambda_hat = 0.0;
  Eigen::VectorXd eta_blup;
  double sigma2_g = 0.0;
  double sigma2 = 0.0;
  double se_lambda = 0.0;  // ignores uncertainty in the variance components
  double reml_loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool boundary = false;  // sigma2_g clamped to zero; eta_blup is then zero
  double ci_lower = 0.0;  // lambda_hat -/+ 1.96 se_lambda
  double ci_upper = 0.0;
  std::vector<double> loglik_trace;  // REML log-likelihood at each iterate

  bool covers(double value) const { return ci_lower <= value && value <= ci_upper; }
};

struct HendersonSolution {
  double lambda_hat = 0.0;
  Eigen::VectorXd eta;
  double c_inv_lambda = 0.0;     // (lambda, lambda) entry of C^-1
  Eigen::VectorXd c_inv_eta_diag;  // diagonal of the eta block of C^-1
};

class MixedModelSolver {
 public:
  explicit MixedModelSolver(const Eigen::MatrixXd& design);
  explicit MixedModelSolver(const ScheduleMatrix& schedule) : MixedModelSolver(schedule.design) {}

  bool lambda_estimable() const { return lambda_estimable_; }
  Eigen::Index n_games() const { return design_.rows(); }
  Eigen::Index n_teams() const { return design_.cols(); }

  /// ratio = sigma2 / sigma2_g > 0.
  HendersonSolution solve(const Eigen::VectorXd& margins, double ratio) const;

  MixedFit fit(const Eigen::VectorXd& margins, const EMConfig& config = {}) const;

  /// Restricted log-likelihood with lambda profiled out:
  /// -1/2 [ (n-1) log 2pi + log|V| + log(1'V^-1 1) + r'V^-1 r ],  V = sigma2_g ZZ' + sigma2 I.
  double reml_loglik(const Eigen::VectorXd& margins, double sigma2_g, double sigma2) const;

  /// d - lambda 1 - Z eta.
  Eigen::VectorXd conditional_residuals(const Eigen::VectorXd& margins, const MixedFit& fit) const;

 private:
  struct Projection;  // margins expressed in the eigenbasis
  Projection project(const Eigen::VectorXd& margins) const;

  Eigen::MatrixXd design_;
  Eigen::VectorXd eigenvalues_;   // nonzero eigenvalues of Z'Z (range part)
  Eigen::MatrixXd eigenvectors_;  // matching columns of U, N x r
  Eigen::MatrixXd range_basis_;   // P = Z U_r diag(l)^-1/2, orthonormal, n x r
  Eigen::Index null_dim_ = 0;     // N - r
  Eigen::VectorXd one_coords_;    // P'1
  Eigen::VectorXd one_perp_;      // 1 - P P'1
  double one_perp_sq_ = 0.0;
  bool lambda_estimable_ = false;
};

HendersonSolution henderson_solve(const ScheduleMatrix& schedule, double ratio);

/// Throws EstimabilityError when lambda is not estimable and Error for n < 3.
MixedFit fit_mixed(const ScheduleMatrix& schedule, const EMConfig& config = {});

double reml_loglik(const ScheduleMatrix& schedule, double sigma2_g, double sigma2);

}  // namespace hfa
