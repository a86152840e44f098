#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hfa::optimize {

struct Options {
  int max_iter = 500;
  double grad_tol = 1e-9;   // on the max-norm of the gradient
  double step_tol = 1e-12;  // relative parameter change
  double fd_step = 1e-5;    // central-difference step, scaled by max(1, |x_i|)
  int newton_polish = 6;    // finite-difference Newton steps after BFGS
};

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double step);

/// BFGS with backtracking (Armijo) line search on central-difference
/// gradients, followed by a few safeguarded Newton steps on a finite-difference
/// Hessian. Non-finite objective values are treated as +infinity.
Result minimize(const Objective& f, Eigen::VectorXd x0, const Options& options = {});

}  // namespace hfa::optimize
