#include "hfa/diagnostics.hpp"

#include <cmath>

#include "hfa/error.hpp"
#include "hfa/linalg.hpp"
#include "hfa/stats.hpp"

namespace hfa {

namespace {

constexpr double kSingularTol = 1e-10;

DiagnosticResult not_applicable(std::string reason, int dof = 1) {
  DiagnosticResult r;
  r.applicable = false;
  r.dof = dof;
  r.reason = std::move(reason);
  return r;
}

DiagnosticResult applicable(double statistic, int dof) {
  DiagnosticResult r;
  r.applicable = true;
  r.dof = dof;
  r.statistic = std::max(statistic, 0.0);
  r.p_value = stats::chi_squared_sf(*r.statistic, dof);
  return r;
}

}  // namespace

DiagnosticResult schedule_bias_statistic(const ScheduleMatrix& schedule, const Eigen::VectorXd& eta,
                                         double sigma2_g) {
  if (eta.size() != schedule.n_teams()) throw Error("eta length does not match schedule");
  if (!(sigma2_g > 0.0)) return not_applicable("team variance is zero");

  const Eigen::VectorXd net_home = schedule.net_home.cast<double>();
  const double inner = net_home.squaredNorm();  // 1'Z Z'1
  if (inner < kSingularTol * std::max(1.0, static_cast<double>(schedule.n_games()))) {
    return not_applicable("balanced schedule: 1'Z = 0");
  }
  const double projected = net_home.dot(eta);  // 1'Z eta
  return applicable(projected * projected / (inner * sigma2_g), 1);
}

DiagnosticResult schedule_bias_statistic(const MixedFit& fit, const ScheduleMatrix& schedule) {
  if (fit.boundary) return not_applicable("team variance estimate on the boundary");
  return schedule_bias_statistic(schedule, fit.eta_blup, fit.sigma2_g);
}

DiagnosticResult general_bias_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                                        const Eigen::MatrixXd& r, const Eigen::MatrixXd& g,
                                        const Eigen::VectorXd& eta) {
  const Eigen::Index n = x.rows();
  if (z.rows() != n || r.rows() != n || r.cols() != n) throw Error("X, Z and R disagree in rows");
  if (g.rows() != z.cols() || g.cols() != z.cols() || eta.size() != z.cols()) {
    throw Error("G and eta must match the columns of Z");
  }

  const Eigen::LLT<Eigen::MatrixXd> r_chol(r);
  if (r_chol.info() != Eigen::Success) throw Error("R is not positive definite");

  const Eigen::MatrixXd rinv_x = r_chol.solve(x);
  const Eigen::MatrixXd a = rinv_x.transpose() * z;  // X'R^-1 Z, p x q
  const Eigen::MatrixXd inner = a * g * a.transpose();
  const Eigen::VectorXd u = a * eta;

  const int dof = static_cast<int>(linalg::numerical_rank(a));
  if (dof == 0) return not_applicable("X'R^-1 Z has rank zero", 1);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(inner, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0) || sv(sv.size() - 1) < kSingularTol * sv(0)) {
    return not_applicable("X'R^-1 Z G Z'R^-1 X is numerically singular", dof);
  }
  const Eigen::VectorXd w = svd.matrixU().transpose() * u;
  const Eigen::VectorXd wv = svd.matrixV().transpose() * u;
  const double statistic = (w.array() * wv.array() / sv.array()).sum();
  return applicable(statistic, dof);
}

}  // namespace hfa
