#include "hfa/optimize.hpp"

#include <cmath>
#include <limits>

namespace hfa::optimize {

namespace {

double safe(const Objective& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

double step_for(double xi, double base) { return base * std::max(1.0, std::fabs(xi)); }

Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x, double base) {
  const Eigen::Index p = x.size();
  Eigen::MatrixXd h(p, p);
  const double f0 = safe(f, x);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double hi = step_for(x(i), base);
    for (Eigen::Index j = i; j < p; ++j) {
      const double hj = step_for(x(j), base);
      if (i == j) {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp(i) += hi;
        xm(i) -= hi;
        h(i, i) = (safe(f, xp) - 2.0 * f0 + safe(f, xm)) / (hi * hi);
      } else {
        Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
        pp(i) += hi; pp(j) += hj;
        pm(i) += hi; pm(j) -= hj;
        mp(i) -= hi; mp(j) += hj;
        mm(i) -= hi; mm(j) -= hj;
        h(i, j) = (safe(f, pp) - safe(f, pm) - safe(f, mp) + safe(f, mm)) / (4.0 * hi * hj);
        h(j, i) = h(i, j);
      }
    }
  }
  return h;
}

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step_for(x(i), step);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (safe(f, xp) - safe(f, xm)) / (2.0 * h);
  }
  return g;
}

Result minimize(const Objective& f, Eigen::VectorXd x0, const Options& options) {
  const Eigen::Index p = x0.size();
  Result res;
  res.x = std::move(x0);
  res.value = safe(f, res.x);
  if (!std::isfinite(res.value)) return res;

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd g = numeric_gradient(f, res.x, options.fd_step);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    res.iterations = iter + 1;
    if (g.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd dir = -h_inv * g;
    if (dir.dot(g) >= 0.0) {  // lost descent; restart from steepest descent
      h_inv.setIdentity();
      dir = -g;
    }

    double t = 1.0;
    const double slope = dir.dot(g);
    Eigen::VectorXd x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + t * dir;
      f_new = safe(f, x_new);
      if (f_new <= res.value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No decrease along the direction at machine precision.
      res.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * options.grad_tol;
      break;
    }

    const Eigen::VectorXd s = x_new - res.x;
    const double rel_step = s.lpNorm<Eigen::Infinity>() / std::max(1.0, res.x.lpNorm<Eigen::Infinity>());
    const Eigen::VectorXd g_new = numeric_gradient(f, x_new, options.fd_step);
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
      h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
    const double f_drop = res.value - f_new;
    res.x = x_new;
    res.value = f_new;
    g = g_new;
    if (rel_step < options.step_tol && f_drop <= 1e-15 * std::max(1.0, std::fabs(f_new))) {
      res.converged = true;
      break;
    }
  }

  // Newton polish; only accepted when it lowers the objective.
  for (int k = 0; k < options.newton_polish; ++k) {
    const Eigen::MatrixXd hess = numeric_hessian(f, res.x, 1e-4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) break;
    const Eigen::VectorXd gk = numeric_gradient(f, res.x, options.fd_step);
    const Eigen::VectorXd step = -eig.eigenvectors() *
                                 (eig.eigenvectors().transpose() * gk).cwiseQuotient(eig.eigenvalues());
    const Eigen::VectorXd x_try = res.x + step;
    const double f_try = safe(f, x_try);
    if (!(f_try <= res.value)) break;
    const bool tiny = step.lpNorm<Eigen::Infinity>() < 1e-12 * std::max(1.0, res.x.lpNorm<Eigen::Infinity>());
    res.x = x_try;
    res.value = f_try;
    if (tiny) break;
  }
  return res;
}

}  // namespace hfa::optimize
