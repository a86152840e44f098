#include "hfa/fixed_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfa/error.hpp"
#include "hfa/stats.hpp"

namespace hfa {

FixedModelSolver::FixedModelSolver(const Eigen::MatrixXd& design, double estimability_tol)
    : n_games_(design.rows()), tol_(estimability_tol) {
  w_.resize(design.rows(), design.cols() + 1);
  w_.col(0).setOnes();
  w_.rightCols(design.cols()) = design;
  pinv_ = linalg::pseudo_inverse(w_);

  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(w_.cols());
  e1(0) = 1.0;
  lambda_estimable_ = w_.rows() > 0 && linalg::is_estimable(pinv_.row_projector, e1, tol_);

  const Eigen::Index dof = n_games_ - pinv_.rank;
  if (dof > 0) t_quantile_ = stats::t_quantile(0.975, static_cast<double>(dof));
}

FixedModelSolver::Estimate FixedModelSolver::estimate(const Eigen::VectorXd& margins) const {
  if (!lambda_estimable_) throw EstimabilityError("HFA not estimable");
  if (margins.size() != n_games_) throw Error("margin vector length does not match schedule");

  const Eigen::VectorXd theta = pinv_.pinv * margins;
  Estimate out;
  out.lambda_hat = theta(0);
  out.beta_hat = theta.tail(theta.size() - 1);
  out.rss = (margins - w_ * theta).squaredNorm();
  return out;
}

FixedFit FixedModelSolver::fit(const Eigen::VectorXd& margins) const {
  const Eigen::Index dof = n_games_ - pinv_.rank;
  auto est = estimate(margins);
  if (dof <= 0) throw Error("saturated model: no residual degrees of freedom");

  FixedFit fit;
  fit.lambda_hat = est.lambda_hat;
  fit.beta_hat = std::move(est.beta_hat);
  fit.rss = est.rss;
  fit.rank_W = pinv_.rank;
  fit.dof_resid = dof;
  fit.sigma2_hat = est.rss / static_cast<double>(dof);
  fit.se_lambda = std::sqrt(fit.sigma2_hat * pinv_.gram_pinv(0, 0));
  fit.ci_lower = fit.lambda_hat - t_quantile_ * fit.se_lambda;
  fit.ci_upper = fit.lambda_hat + t_quantile_ * fit.se_lambda;
  return fit;
}

bool FixedModelSolver::contrast_estimable(const Eigen::VectorXd& contrast) const {
  return linalg::is_estimable(pinv_.row_projector, contrast, tol_);
}

double FixedModelSolver::contrast_variance_factor(const Eigen::VectorXd& contrast) const {
  return contrast.dot(pinv_.gram_pinv * contrast);
}

FixedFit fit_fixed(const ScheduleMatrix& schedule) {
  return FixedModelSolver(schedule).fit(schedule.margins);
}

PairwiseDifference pairwise_difference(const FixedFit& fit, const ScheduleMatrix& schedule,
                                       Eigen::Index i, Eigen::Index j) {
  const Eigen::Index n_teams = schedule.n_teams();
  if (i < 0 || j < 0 || i >= n_teams || j >= n_teams) throw Error("team index out of range");
  if (fit.beta_hat.size() != n_teams) throw Error("fit does not match schedule");
  if (i == j) return {0.0, 0.0};

  const FixedModelSolver solver(schedule);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n_teams + 1);
  c(i + 1) = 1.0;
  c(j + 1) = -1.0;
  if (!solver.contrast_estimable(c)) {
    throw EstimabilityError("difference between '" + schedule.teams[static_cast<std::size_t>(i)] +
                            "' and '" + schedule.teams[static_cast<std::size_t>(j)] +
                            "' is not estimable");
  }
  const double factor = std::max(0.0, solver.contrast_variance_factor(c));
  return {fit.beta_hat(i) - fit.beta_hat(j), std::sqrt(fit.sigma2_hat * factor)};
}

}  // namespace hfa
