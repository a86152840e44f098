#include "hfa/mixed_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hfa/error.hpp"

namespace hfa {

namespace {

constexpr double kNullEigenTol = 1e-9;  // relative to the largest eigenvalue of Z'Z
constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

struct MixedModelSolver::Projection {
  Eigen::VectorXd delta;     // P'd
  double one_perp_d = 0.0;   // 1_perp' d
  double lambda_perp = 0.0;  // least-squares intercept on the null part
  double min_perp_sq = 0.0;  // || d_perp - lambda_perp 1_perp ||^2
  double mean = 0.0;
  double centered_sq = 0.0;  // || d - mean 1 ||^2
};

// Henderson quantities at one value of k = sigma2 / sigma2_g.
struct HendersonState {
  double k = 0.0;
  Eigen::ArrayXd g;      // 1 / (l + k)
  double s = 0.0;        // Schur complement of lambda: 1 / C^{lambda,lambda}
  double lambda_hat = 0.0;
  Eigen::ArrayXd xi;     // eta_hat in the U_r basis
  Eigen::ArrayXd resid;  // delta - lambda_hat alpha
  double v_sq = 0.0;     // || (Z'Z + kI)^-1 Z'1 ||^2 over the range part
};

MixedModelSolver::MixedModelSolver(const Eigen::MatrixXd& design) : design_(design) {
  const Eigen::Index n = design_.rows();
  const Eigen::Index n_teams = design_.cols();
  if (n == 0 || n_teams == 0) return;

  const Eigen::MatrixXd gram = design_.transpose() * design_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double cutoff = kNullEigenTol * std::max(values.maxCoeff(), 1.0);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > cutoff) keep.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  eigenvalues_.resize(r);
  eigenvectors_.resize(n_teams, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    eigenvalues_(c) = values(keep[static_cast<std::size_t>(c)]);
    eigenvectors_.col(c) = eig.eigenvectors().col(keep[static_cast<std::size_t>(c)]);
  }
  null_dim_ = n_teams - r;

  range_basis_ = design_ * eigenvectors_ * eigenvalues_.cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  one_coords_ = range_basis_.transpose() * ones;
  one_perp_ = ones - range_basis_ * one_coords_;
  one_perp_sq_ = one_perp_.squaredNorm();
  lambda_estimable_ = one_perp_sq_ > 1e-9 * static_cast<double>(n);
}

MixedModelSolver::Projection MixedModelSolver::project(const Eigen::VectorXd& margins) const {
  if (margins.size() != n_games()) throw Error("margin vector length does not match schedule");
  if (!lambda_estimable_) throw EstimabilityError("HFA not estimable");

  Projection p;
  p.delta = range_basis_.transpose() * margins;
  const Eigen::VectorXd perp = margins - range_basis_ * p.delta;
  p.one_perp_d = one_perp_.dot(perp);
  p.lambda_perp = p.one_perp_d / one_perp_sq_;
  p.min_perp_sq = (perp - p.lambda_perp * one_perp_).squaredNorm();
  p.mean = margins.mean();
  p.centered_sq = (margins.array() - p.mean).matrix().squaredNorm();
  return p;
}

namespace {

HendersonState henderson_state(const Eigen::VectorXd& l, const Eigen::VectorXd& alpha_v,
                               double one_perp_sq, const Eigen::VectorXd& delta_v,
                               double one_perp_d, double k) {
  const Eigen::ArrayXd lam = l.array();
  const Eigen::ArrayXd alpha = alpha_v.array();
  const Eigen::ArrayXd delta = delta_v.array();

  HendersonState st;
  st.k = k;
  st.g = (lam + k).inverse();
  st.s = one_perp_sq + k * (alpha.square() * st.g).sum();
  st.lambda_hat = (one_perp_d + k * (alpha * delta * st.g).sum()) / st.s;
  st.resid = delta - st.lambda_hat * alpha;
  st.xi = st.g * lam.sqrt() * st.resid;
  st.v_sq = (st.g.square() * lam * alpha.square()).sum();
  return st;
}

}  // namespace

HendersonSolution MixedModelSolver::solve(const Eigen::VectorXd& margins, double ratio) const {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw Error("variance ratio must be positive and finite");
  const auto p = project(margins);
  const auto st = henderson_state(eigenvalues_, one_coords_, one_perp_sq_, p.delta, p.one_perp_d, ratio);
  if (!(st.s > 0.0)) throw Error("Henderson system is singular");

  HendersonSolution out;
  out.lambda_hat = st.lambda_hat;
  out.eta = eigenvectors_ * st.xi.matrix();
  out.c_inv_lambda = 1.0 / st.s;

  // diag of (Z'Z + kI)^-1 plus the rank-one Schur correction.
  const Eigen::ArrayXd v = st.g * eigenvalues_.array().sqrt() * one_coords_.array();
  const Eigen::VectorXd uv = eigenvectors_ * v.matrix();
  const Eigen::ArrayXd u_sq = eigenvectors_.array().square();
  const Eigen::VectorXd range_diag = u_sq.matrix() * st.g.matrix();
  const Eigen::VectorXd null_weight = Eigen::VectorXd::Ones(n_teams()) - u_sq.matrix().rowwise().sum();
  out.c_inv_eta_diag = range_diag + null_weight / ratio + uv.cwiseAbs2() / st.s;
  return out;
}

double MixedModelSolver::reml_loglik(const Eigen::VectorXd& margins, double sigma2_g,
                                     double sigma2) const {
  if (!(sigma2 > 0.0) || sigma2_g < 0.0) throw Error("invalid variance components");
  const auto p = project(margins);
  const double n = static_cast<double>(n_games());

  if (sigma2_g == 0.0) {
    return -0.5 * ((n - 1.0) * kLog2Pi + n * std::log(sigma2) + std::log(n / sigma2) +
                   p.centered_sq / sigma2);
  }
  const double k = sigma2 / sigma2_g;
  const auto st = henderson_state(eigenvalues_, one_coords_, one_perp_sq_, p.delta, p.one_perp_d, k);
  const double log_det_v = n * std::log(sigma2) + (eigenvalues_.array() / k).log1p().sum();
  const double dl = st.lambda_hat - p.lambda_perp;
  const double quad =
      (p.min_perp_sq + dl * dl * one_perp_sq_ + k * (st.resid.square() * st.g).sum()) / sigma2;
  return -0.5 * ((n - 1.0) * kLog2Pi + log_det_v + std::log(st.s / sigma2) + quad);
}

MixedFit MixedModelSolver::fit(const Eigen::VectorXd& margins, const EMConfig& config) const {
  if (config.max_iter < 1 || !(config.rel_tol > 0.0)) throw Error("invalid EM configuration");
  const Eigen::Index n_obs = n_games();
  if (n_obs < 3) throw Error("mixed model needs at least 3 games");

  const auto p = project(margins);
  const double n = static_cast<double>(n_obs);
  const double n_teams_d = static_cast<double>(n_teams());
  const double var_d = p.centered_sq / (n - 1.0);
  const double scale = var_d > 0.0 ? var_d : 1.0;
  const double floor = config.var_floor * scale;
  const Eigen::ArrayXd lam = eigenvalues_.array();
  const Eigen::ArrayXd alpha = one_coords_.array();

  auto loglik_at = [&](const HendersonState& st, double sigma2) {
    const double log_det_v = n * std::log(sigma2) + (lam / st.k).log1p().sum();
    const double dl = st.lambda_hat - p.lambda_perp;
    const double quad =
        (p.min_perp_sq + dl * dl * one_perp_sq_ + st.k * (st.resid.square() * st.g).sum()) / sigma2;
    return -0.5 * ((n - 1.0) * kLog2Pi + log_det_v + std::log(st.s / sigma2) + quad);
  };

  MixedFit fit;
  double sigma2_g = 0.5 * scale;
  double sigma2 = 0.5 * scale;
  bool boundary = false;
  double prev_ll = 0.0;
  double prev_sigma2_g = sigma2_g;
  double prev_sigma2 = sigma2;

  for (int iter = 0;; ++iter) {
    const auto st =
        henderson_state(eigenvalues_, one_coords_, one_perp_sq_, p.delta, p.one_perp_d, sigma2 / sigma2_g);
    const double ll = loglik_at(st, sigma2);
    fit.loglik_trace.push_back(ll);

    if (iter > 0) {
      const double rel = std::max(std::fabs(sigma2_g - prev_sigma2_g) / sigma2_g,
                                  std::fabs(sigma2 - prev_sigma2) / sigma2);
      if (rel < config.rel_tol || std::fabs(ll - prev_ll) < config.loglik_tol) {
        fit.converged = true;
        break;
      }
    }
    if (iter >= config.max_iter) break;
    prev_ll = ll;
    prev_sigma2_g = sigma2_g;
    prev_sigma2 = sigma2;

    // E-step moments from the current Henderson solve.
    const double k = st.k;
    const double eta_sq = st.xi.square().sum();
    const double trace_c = sigma2 * (st.g.sum() + st.v_sq / st.s) + sigma2_g * static_cast<double>(null_dim_);
    const double dl = st.lambda_hat - p.lambda_perp;
    const double perp_sq = p.min_perp_sq + dl * dl * one_perp_sq_;

    double next_g = 0.0;
    double next_e = 0.0;
    if (config.variant == EmVariant::plain) {
      const double cond_resid_sq = perp_sq + (k * k) * (st.g.square() * st.resid.square()).sum();
      const double edf = 1.0 + (lam * st.g).sum() - k * st.v_sq / st.s;
      next_e = (cond_resid_sq + sigma2 * edf) / n;
      next_g = (eta_sq + trace_c) / n_teams_d;
    } else {
      const double cross = (lam.sqrt() * st.xi * st.resid).sum() +
                           sigma2 * (lam * alpha.square() * st.g).sum() / st.s;
      const double quad = (lam * st.xi.square()).sum() +
                          sigma2 * ((lam * st.g).sum() + (lam.square() * alpha.square() * st.g.square()).sum() / st.s);
      const double marginal_sq = perp_sq + st.resid.square().sum() + sigma2 * n / st.s;
      const double a = quad > 0.0 ? cross / quad : 1.0;
      next_e = (marginal_sq - (quad > 0.0 ? cross * cross / quad : 0.0)) / n;
      next_g = a * a * (eta_sq + trace_c) / n_teams_d;
    }
    sigma2 = std::max(next_e, floor);
    sigma2_g = next_g;
    fit.iterations = iter + 1;

    if (sigma2_g < floor) {
      boundary = true;
      fit.converged = true;
      break;
    }
  }

  // The EM creeps toward sigma2_g = 0 sublinearly; compare against the boundary optimum directly.
  const double sigma2_boundary = std::max(p.centered_sq / (n - 1.0), floor);
  const double ll_boundary =
      -0.5 * ((n - 1.0) * kLog2Pi + n * std::log(sigma2_boundary) + std::log(n / sigma2_boundary) +
              p.centered_sq / sigma2_boundary);
  if (!boundary && ll_boundary >= fit.loglik_trace.back()) boundary = true;

  if (boundary) {
    fit.boundary = true;
    fit.converged = true;
    fit.sigma2_g = 0.0;
    fit.sigma2 = sigma2_boundary;
    fit.lambda_hat = p.mean;
    fit.eta_blup = Eigen::VectorXd::Zero(n_teams());
    fit.se_lambda = std::sqrt(sigma2_boundary / n);
    fit.reml_loglik = ll_boundary;
    fit.loglik_trace.push_back(ll_boundary);
  } else {
    const auto st =
        henderson_state(eigenvalues_, one_coords_, one_perp_sq_, p.delta, p.one_perp_d, sigma2 / sigma2_g);
    fit.sigma2_g = sigma2_g;
    fit.sigma2 = sigma2;
    fit.lambda_hat = st.lambda_hat;
    fit.eta_blup = eigenvectors_ * st.xi.matrix();
    fit.se_lambda = std::sqrt(sigma2 / st.s);
    fit.reml_loglik = fit.loglik_trace.back();
  }
  fit.ci_lower = fit.lambda_hat - 1.959963984540054 * fit.se_lambda;
  fit.ci_upper = fit.lambda_hat + 1.959963984540054 * fit.se_lambda;
  return fit;
}

Eigen::VectorXd MixedModelSolver::conditional_residuals(const Eigen::VectorXd& margins,
                                                        const MixedFit& fit) const {
  return margins - Eigen::VectorXd::Constant(margins.size(), fit.lambda_hat) - design_ * fit.eta_blup;
}

HendersonSolution henderson_solve(const ScheduleMatrix& schedule, double ratio) {
  return MixedModelSolver(schedule).solve(schedule.margins, ratio);
}

MixedFit fit_mixed(const ScheduleMatrix& schedule, const EMConfig& config) {
  if (!check_estimability(schedule).lambda_estimable) throw EstimabilityError("HFA not estimable");
  if (schedule.n_games() < 3) throw Error("mixed model needs at least 3 games");
  return MixedModelSolver(schedule).fit(schedule.margins, config);
}

double reml_loglik(const ScheduleMatrix& schedule, double sigma2_g, double sigma2) {
  return MixedModelSolver(schedule).reml_loglik(schedule.margins, sigma2_g, sigma2);
}

}  // namespace hfa
