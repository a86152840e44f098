#pragma once

// Fixed team effects: d = lambda 1 + Z beta + eps, solved with the Moore-Penrose
// inverse of W = [1 | Z].
//
// beta_hat is the minimum-norm solution. Individual team effects are NOT
// estimable (adding a constant to every beta leaves the fit unchanged); only
// lambda and within-component differences beta_i - beta_j are.

#include <Eigen/Dense>

#include "hfa/linalg.hpp"
#include "hfa/schedule.hpp"

namespace hfa {

struct FixedFit {
  double lambda_hat = 0.0;
  Eigen::VectorXd beta_hat;
  double sigma2_hat = 0.0;
  double se_lambda = 0.0;
  Eigen::Index dof_resid = 0;
  Eigen::Index rank_W = 0;
  double rss = 0.0;
  double ci_lower = 0.0;  // t interval with dof_resid degrees of freedom
  double ci_upper = 0.0;

  bool covers(double value) const { return ci_lower <= value && value <= ci_upper; }
};

struct PairwiseDifference {
  double estimate = 0.0;
  double se = 0.0;
};

/// Pseudoinverse of [1 | Z] for one schedule, reusable across response vectors.
class FixedModelSolver {
 public:
  explicit FixedModelSolver(const Eigen::MatrixXd& design, double estimability_tol = 1e-8);
  explicit FixedModelSolver(const ScheduleMatrix& schedule, double estimability_tol = 1e-8)
      : FixedModelSolver(schedule.design, estimability_tol) {}

  struct Estimate {
    double lambda_hat = 0.0;
    Eigen::VectorXd beta_hat;
    double rss = 0.0;
  };

  bool lambda_estimable() const { return lambda_estimable_; }
  Eigen::Index rank() const { return pinv_.rank; }
  Eigen::Index n_games() const { return n_games_; }

  /// Point estimates only; valid for saturated designs. Throws when lambda is not estimable.
  Estimate estimate(const Eigen::VectorXd& margins) const;

  /// Full fit. Throws EstimabilityError("HFA not estimable") or Error("saturated model").
  FixedFit fit(const Eigen::VectorXd& margins) const;

  bool contrast_estimable(const Eigen::VectorXd& contrast) const;

  /// c' (W'W)+ c for a contrast over (lambda, beta).
  double contrast_variance_factor(const Eigen::VectorXd& contrast) const;

  const Eigen::MatrixXd& design_with_intercept() const { return w_; }

 private:
  Eigen::MatrixXd w_;
  linalg::PseudoInverse pinv_;
  Eigen::Index n_games_ = 0;
  double tol_ = 1e-8;
  bool lambda_estimable_ = false;
  double t_quantile_ = 0.0;
};

FixedFit fit_fixed(const ScheduleMatrix& schedule);

/// beta_i - beta_j with its standard error. Throws EstimabilityError for a
/// contrast outside the row space (e.g. teams in disconnected components).
PairwiseDifference pairwise_difference(const FixedFit& fit, const ScheduleMatrix& schedule,
                                       Eigen::Index i, Eigen::Index j);

}  // namespace hfa
