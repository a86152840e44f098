#pragma once

// Chi-square statistics that flag dependence between the schedule and the
// random effects, the mechanism that biases mixed-model fixed effects.

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hfa/mixed_model.hpp"
#include "hfa/schedule.hpp"

namespace hfa {

struct DiagnosticResult {
  bool applicable = false;
  std::optional<double> statistic;
  std::optional<double> p_value;
  int dof = 1;
  std::string reason;  // set when not applicable
};

/// (1/sigma2_g) eta' Z'1 (1'Z Z'1)^-1 1'Z eta against chi-square(1), using the
/// fit's REML sigma2_g and eBLUPs. Not applicable for a balanced schedule or a
/// boundary fit.
DiagnosticResult schedule_bias_statistic(const MixedFit& fit, const ScheduleMatrix& schedule);

/// Same statistic with caller-supplied (e.g. known) eta and sigma2_g.
DiagnosticResult schedule_bias_statistic(const ScheduleMatrix& schedule, const Eigen::VectorXd& eta,
                                         double sigma2_g);

/// eta' Z'R^-1 X (X'R^-1 Z G Z'R^-1 X)^-1 X'R^-1 Z eta against
/// chi-square(rank(X'R^-1 Z)). R must be positive definite.
DiagnosticResult general_bias_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                                        const Eigen::MatrixXd& r, const Eigen::MatrixXd& g,
                                        const Eigen::VectorXd& eta);

}  // namespace hfa
