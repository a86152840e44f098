#include "hfa/phase2.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "csv.hpp"
#include "hfa/error.hpp"
#include "hfa/optimize.hpp"
#include "hfa/parallel.hpp"
#include "hfa/random.hpp"
#include "hfa/stats.hpp"

namespace hfa {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kZ975 = 1.959963984540054;
constexpr double kLogFloor = -25.0;  // log-Cholesky diagonal bounds
constexpr double kLogCeil = 20.0;

Coefficient make_coefficient(std::string name, double estimate, double se) {
  Coefficient c;
  c.name = std::move(name);
  c.estimate = estimate;
  c.se = se;
  c.ci_lower = estimate - kZ975 * se;
  c.ci_upper = estimate + kZ975 * se;
  c.p_value = se > 0.0 ? stats::two_sided_normal_p(estimate / se) : (estimate == 0.0 ? 1.0 : 0.0);
  return c;
}

std::uint64_t fingerprint(const HfaSeries& series) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& r : series.rows) {
    feed(static_cast<std::uint64_t>(static_cast<std::int64_t>(r.year)));
    for (char ch : r.conference) feed(static_cast<unsigned char>(ch));
    feed(std::bit_cast<std::uint64_t>(r.lambda_hat));
    feed(std::bit_cast<std::uint64_t>(r.se));
  }
  return h;
}

// Per-conference sufficient statistics of the weighted design X_j = Z_j = [1, t].
struct ConferenceStats {
  std::string name;
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();  // X'W^-1 X
  Eigen::Vector2d c = Eigen::Vector2d::Zero();  // X'W^-1 y
  double q = 0.0;                               // y'W^-1 y
  double log_det_w = 0.0;
  int n = 0;
};

struct RemlProblem {
  std::vector<ConferenceStats> groups;
  int n = 0;
  double time_center = 0.0;  // years; internal time is year - time_center
  double weight_scale = 1.0; // se values are divided by this before fitting
};

RemlProblem make_problem(const HfaSeries& series) {
  RemlProblem prob;
  double log_se_sum = 0.0;
  double year_sum = 0.0;
  for (const auto& r : series.rows) {
    log_se_sum += std::log(r.se);
    year_sum += r.year;
  }
  const double n = static_cast<double>(series.rows.size());
  prob.weight_scale = std::exp(log_se_sum / n);
  prob.time_center = year_sum / n;
  prob.n = static_cast<int>(series.rows.size());

  std::map<std::string, ConferenceStats> by_name;
  for (const auto& r : series.rows) {
    auto& g = by_name[r.conference];
    g.name = r.conference;
    const double w2 = (r.se / prob.weight_scale) * (r.se / prob.weight_scale);
    const Eigen::Vector2d x(1.0, r.year - prob.time_center);
    g.a += x * x.transpose() / w2;
    g.c += x * r.lambda_hat / w2;
    g.q += r.lambda_hat * r.lambda_hat / w2;
    g.log_det_w += std::log(w2);
    ++g.n;
  }
  for (auto& [name, g] : by_name) prob.groups.push_back(std::move(g));
  return prob;
}

struct RemlEval {
  double loglik = -std::numeric_limits<double>::infinity();
  Eigen::Vector2d beta = Eigen::Vector2d::Zero();
  Eigen::Matrix2d xhx = Eigen::Matrix2d::Zero();
  double sigma2 = 0.0;
  double rss = 0.0;
};

// Profiled REML at relative covariance Gamma = L L'.
RemlEval evaluate(const RemlProblem& prob, const Eigen::Matrix2d& l) {
  Eigen::Matrix2d xhx = Eigen::Matrix2d::Zero();
  Eigen::Vector2d xhy = Eigen::Vector2d::Zero();
  double yhy = 0.0;
  double log_det_h = 0.0;
  for (const auto& g : prob.groups) {
    const Eigen::Matrix2d al = g.a * l;
    const Eigen::Matrix2d m = Eigen::Matrix2d::Identity() + l.transpose() * al;
    const Eigen::Matrix2d m_inv = m.inverse();
    const Eigen::Vector2d lc = l.transpose() * g.c;
    xhx += g.a - al * m_inv * al.transpose();
    xhy += g.c - al * (m_inv * lc);
    yhy += g.q - lc.dot(m_inv * lc);
    log_det_h += g.log_det_w + std::log(m.determinant());
  }
  RemlEval out;
  out.xhx = xhx;
  const double det_xhx = xhx.determinant();
  if (!(det_xhx > 0.0)) return out;
  out.beta = xhx.inverse() * xhy;
  out.rss = yhy - out.beta.dot(xhy);
  const double dof = prob.n - 2.0;
  if (!(out.rss > 0.0)) {
    out.rss = 0.0;
    return out;
  }
  out.sigma2 = out.rss / dof;
  out.loglik = -0.5 * (dof * (kLog2Pi + std::log(out.sigma2) + 1.0) + log_det_h + std::log(det_xhx));
  return out;
}

Eigen::Matrix2d cholesky_factor(const Eigen::Vector3d& theta) {
  Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
  l(0, 0) = std::exp(std::clamp(theta(0), kLogFloor, kLogCeil));
  l(1, 0) = theta(1);
  l(1, 1) = std::exp(std::clamp(theta(2), kLogFloor, kLogCeil));
  return l;
}

Eigen::Vector3d log_cholesky(const Eigen::Matrix2d& gamma) {
  Eigen::Matrix2d pd = gamma;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(pd);
  const double floor = 1e-6 * std::max(eig.eigenvalues().maxCoeff(), 1e-6);
  const Eigen::Vector2d vals = eig.eigenvalues().cwiseMax(floor);
  pd = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::Matrix2d l = pd.llt().matrixL();
  return {std::log(l(0, 0)), l(1, 0), std::log(l(1, 1))};
}

// Moment-style starting value for Gamma from per-conference weighted lines.
Eigen::Matrix2d moment_start(const RemlProblem& prob, double sigma2_g0) {
  std::vector<Eigen::Vector2d> lines;
  Eigen::Matrix2d sampling = Eigen::Matrix2d::Zero();
  for (const auto& g : prob.groups) {
    if (g.n < 3 || g.a.determinant() <= 1e-12 * g.a.squaredNorm()) continue;
    const Eigen::Matrix2d a_inv = g.a.inverse();
    lines.push_back(a_inv * g.c);
    sampling += a_inv;
  }
  Eigen::Matrix2d gamma = Eigen::Matrix2d::Identity() * 0.1;
  if (lines.size() >= 3) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& v : lines) mean += v;
    mean /= static_cast<double>(lines.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& v : lines) cov += (v - mean) * (v - mean).transpose();
    cov /= static_cast<double>(lines.size() - 1);
    sampling /= static_cast<double>(lines.size());
    gamma = cov / std::max(sigma2_g0, 1e-12) - sampling;
    // Keep the start strictly inside the cone.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gamma);
    const double scale = std::max(std::fabs(cov(0, 0)), 1e-8) / std::max(sigma2_g0, 1e-12);
    Eigen::Vector2d vals = eig.eigenvalues();
    for (int i = 0; i < 2; ++i) vals(i) = std::max(vals(i), 1e-3 * scale);
    gamma = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  }
  return gamma;
}

struct RcSolution {
  Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
  RemlEval eval;
  RemlEval eval_g0;
  bool converged = false;
  bool exact = false;
};

RcSolution solve_random_coefficient(const RemlProblem& prob) {
  RcSolution sol;
  sol.eval_g0 = evaluate(prob, Eigen::Matrix2d::Zero());
  double yy = 0.0;
  for (const auto& g : prob.groups) yy += g.q;
  // rss from the normal equations carries cancellation error of order eps * y'W^-1 y
  if (sol.eval_g0.rss <= 1e-12 * yy) {
    sol.eval_g0.rss = 0.0;
    sol.eval_g0.sigma2 = 0.0;
    sol.eval = sol.eval_g0;
    sol.exact = true;
    sol.converged = true;
    return sol;
  }

  const optimize::Objective objective = [&prob](const Eigen::VectorXd& theta) {
    const auto e = evaluate(prob, cholesky_factor(theta));
    return -e.loglik;
  };

  const Eigen::Matrix2d gamma0 = moment_start(prob, sol.eval_g0.sigma2);
  const std::array<Eigen::Matrix2d, 3> starts = {gamma0, gamma0 * 0.1, gamma0 * 10.0};

  double best = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    const auto res = optimize::minimize(objective, log_cholesky(start));
    if (res.value < best) {
      best = res.value;
      sol.l = cholesky_factor(res.x);
      sol.converged = res.converged;
    }
  }
  sol.eval = evaluate(prob, sol.l);
  if (!(sol.eval.loglik >= sol.eval_g0.loglik)) {
    sol.l.setZero();
    sol.eval = sol.eval_g0;
    sol.converged = true;
  }
  return sol;
}

RandomCoefFit assemble_random_coefficient(const RemlProblem& prob, const RcSolution& sol,
                                          int time_origin) {
  RandomCoefFit fit;
  fit.time_origin = time_origin;
  fit.n_obs = prob.n;
  fit.converged = sol.converged;
  fit.exact_fit = sol.exact;
  fit.reml_loglik = sol.exact ? std::numeric_limits<double>::infinity() : sol.eval.loglik;
  fit.reml_loglik_g0 = sol.exact ? std::numeric_limits<double>::infinity() : sol.eval_g0.loglik;

  const double s2 = sol.eval.sigma2;  // on the normalised weight scale
  const double m = prob.time_center - time_origin;
  // Internal coefficients b_c relate to origin-coded ones by b_c = T b, T = [1 m; 0 1].
  Eigen::Matrix2d t_inv;
  t_inv << 1.0, -m, 0.0, 1.0;

  const Eigen::Vector2d beta = t_inv * sol.eval.beta;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  if (sol.eval.xhx.determinant() > 0.0) cov = t_inv * (s2 * sol.eval.xhx.inverse()) * t_inv.transpose();
  fit.alpha0 = make_coefficient("alpha0", beta(0), std::sqrt(std::max(cov(0, 0), 0.0)));
  fit.alpha1 = make_coefficient("alpha1", beta(1), std::sqrt(std::max(cov(1, 1), 0.0)));

  const Eigen::Matrix2d gamma = sol.l * sol.l.transpose();
  fit.G = t_inv * (s2 * gamma) * t_inv.transpose();
  fit.sigma2_lambda = s2 / (prob.weight_scale * prob.weight_scale);

  for (const auto& g : prob.groups) {
    const Eigen::Matrix2d al = g.a * sol.l;
    const Eigen::Matrix2d m_inv = (Eigen::Matrix2d::Identity() + sol.l.transpose() * al).inverse();
    const Eigen::Vector2d b_c = sol.l * m_inv * sol.l.transpose() * (g.c - g.a * sol.eval.beta);
    const Eigen::Vector2d b = t_inv * b_c;
    fit.blups.push_back({g.name, b(0), b(1)});
  }
  return fit;
}

void require_random_coef_shape(const HfaSeries& series) {
  series.validate();
  const auto n_conf = series.conferences().size();
  if (n_conf < 3) {
    throw Error("random-coefficient model needs at least 3 conferences (found " + std::to_string(n_conf) +
                "); use the fixed-trend models for two conferences");
  }
  if (series.distinct_years() < 3) throw Error("random-coefficient model needs at least 3 distinct years");
}

// Weighted least squares of the series on a given design.
struct WlsFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd xwx_inv;
  double rss = 0.0;
  double log_det_xwx = 0.0;
  double log_det_w = 0.0;
};

WlsFit weighted_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& se) {
  const Eigen::VectorXd inv_se = se.cwiseInverse();
  const Eigen::MatrixXd xs = inv_se.asDiagonal() * x;
  const Eigen::VectorXd ys = inv_se.asDiagonal() * y;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  if (qr.rank() < x.cols()) throw Error("trend design is rank deficient");
  WlsFit out;
  out.beta = qr.solve(ys);
  out.rss = (ys - xs * out.beta).squaredNorm();
  const Eigen::MatrixXd xwx = xs.transpose() * xs;
  out.xwx_inv = xwx.inverse();
  out.log_det_xwx = std::log(xwx.determinant());
  out.log_det_w = 2.0 * se.array().log().sum();
  return out;
}

}  // namespace

void HfaSeries::validate() const {
  std::set<std::pair<int, std::string>> seen;
  for (const auto& r : rows) {
    if (!(r.se > 0.0) || !std::isfinite(r.se)) {
      throw Error("non-positive standard error for " + r.conference + " " + std::to_string(r.year));
    }
    if (!std::isfinite(r.lambda_hat)) {
      throw Error("non-finite HFA estimate for " + r.conference + " " + std::to_string(r.year));
    }
    if (!seen.emplace(r.year, r.conference).second) {
      throw Error("duplicate row for " + r.conference + " " + std::to_string(r.year));
    }
  }
}

std::vector<std::string> HfaSeries::conferences() const {
  std::set<std::string> names;
  for (const auto& r : rows) names.insert(r.conference);
  return {names.begin(), names.end()};
}

std::size_t HfaSeries::distinct_years() const {
  std::set<int> years;
  for (const auto& r : rows) years.insert(r.year);
  return years.size();
}

HfaSeries parse_hfa_series(std::istream& in, const std::optional<std::string>& model_filter) {
  csv::LineReader reader(in);
  const auto header = reader.expect_header({"year", "conference", "lambda_hat", "se"});
  const bool has_model = header.size() >= 5 && header[4] == "model";

  HfaSeries out;
  std::string line;
  while (reader.next(line)) {
    const auto n = reader.line_no();
    const auto f = csv::split(line);
    if (f.size() != header.size()) {
      throw ParseError(n, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()));
    }
    if (has_model && model_filter && f[4] != *model_filter) continue;
    const auto year = csv::to_integer(f[0]);
    const auto lambda = csv::to_real(f[2]);
    const auto se = csv::to_real(f[3]);
    if (!year) throw ParseError(n, "year '" + f[0] + "' is not an integer");
    if (!lambda) throw ParseError(n, "lambda_hat '" + f[2] + "' is not a number");
    if (!se) throw ParseError(n, "se '" + f[3] + "' is not a number");
    if (f[1].empty()) throw ParseError(n, "empty conference");
    out.rows.push_back({static_cast<int>(*year), f[1], *lambda, *se});
  }
  return out;
}

HfaSeries parse_hfa_series_file(const std::string& path, const std::optional<std::string>& model_filter) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open HFA series '" + path + "'");
  return parse_hfa_series(in, model_filter);
}

RandomCoefFit fit_random_coefficient(const HfaSeries& series, const Phase2Options& options) {
  require_random_coef_shape(series);
  const auto prob = make_problem(series);
  return assemble_random_coefficient(prob, solve_random_coefficient(prob), options.time_origin);
}

const char* to_string(TrendModel model) {
  switch (model) {
    case TrendModel::full: return "full";
    case TrendModel::common_trend: return "common_trend";
    case TrendModel::no_trend: return "no_trend";
  }
  return "unknown";
}

std::optional<TrendModel> trend_model_from_string(const std::string& name) {
  if (name == "full") return TrendModel::full;
  if (name == "common_trend") return TrendModel::common_trend;
  if (name == "no_trend") return TrendModel::no_trend;
  return std::nullopt;
}

const Coefficient* FixedTrendFit::find(const std::string& name) const {
  for (const auto& c : coefficients) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

FixedTrendFit fit_fixed_trend(const HfaSeries& series, TrendModel model,
                              const std::optional<std::string>& reference, const Phase2Options& options) {
  series.validate();
  const auto confs = series.conferences();
  if (series.distinct_years() < 2) throw Error("trend model needs at least 2 distinct years");

  FixedTrendFit fit;
  fit.model = model;
  fit.n_obs = static_cast<int>(series.rows.size());
  fit.data_fingerprint = fingerprint(series);

  const bool two_groups = model != TrendModel::common_trend;
  if (two_groups) {
    if (confs.size() != 2) {
      throw Error(std::string("model ") + to_string(model) + " needs exactly 2 conferences (found " +
                  std::to_string(confs.size()) + ")");
    }
    fit.conference_a = confs[0];
    fit.conference_b = confs[1];
    if (reference) {
      if (*reference == confs[1]) {
        std::swap(fit.conference_a, fit.conference_b);
      } else if (*reference != confs[0]) {
        throw Error("reference conference '" + *reference + "' is not in the series");
      }
    }
  } else if (!confs.empty()) {
    fit.conference_a = reference.value_or(confs[0]);
  }

  std::vector<std::string> names;
  switch (model) {
    case TrendModel::full: names = {"beta0A", "beta1A", "beta0B", "beta1B"}; break;
    case TrendModel::common_trend: names = {"beta0A", "beta1A"}; break;
    case TrendModel::no_trend: names = {"beta0A", "beta0B"}; break;
  }

  const auto n = static_cast<Eigen::Index>(series.rows.size());
  const auto p = static_cast<Eigen::Index>(names.size());
  if (n <= p) throw Error("trend model needs more rows than coefficients");
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  Eigen::VectorXd se(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = series.rows[static_cast<std::size_t>(i)];
    const double t = r.year - options.time_origin;
    const double is_b = two_groups && r.conference == fit.conference_b ? 1.0 : 0.0;
    switch (model) {
      case TrendModel::full: x.row(i) << 1.0, t, is_b, is_b * t; break;
      case TrendModel::common_trend: x.row(i) << 1.0, t; break;
      case TrendModel::no_trend: x.row(i) << 1.0, is_b; break;
    }
    y(i) = r.lambda_hat;
    se(i) = r.se;
  }

  const auto wls = weighted_least_squares(x, y, se);
  const double nd = static_cast<double>(n);
  const double dof = nd - static_cast<double>(p);
  fit.sigma2_lambda = wls.rss / dof;
  const double sigma2_ml = wls.rss / nd;
  fit.loglik_ml = -0.5 * (nd * (kLog2Pi + std::log(sigma2_ml) + 1.0) + wls.log_det_w);
  fit.reml_loglik =
      -0.5 * (dof * (kLog2Pi + std::log(fit.sigma2_lambda) + 1.0) + wls.log_det_w + wls.log_det_xwx);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = fit.sigma2_lambda * wls.xwx_inv(j, j);
    fit.coefficients.push_back(make_coefficient(names[static_cast<std::size_t>(j)], wls.beta(j),
                                                std::sqrt(std::max(var, 0.0))));
  }
  return fit;
}

LrtResult lrt(const FixedTrendFit& full, const FixedTrendFit& reduced) {
  if (full.data_fingerprint != reduced.data_fingerprint || full.n_obs != reduced.n_obs) {
    throw Error("likelihood-ratio test needs both fits on identical data");
  }
  const bool nested = full.model == reduced.model || full.model == TrendModel::full;
  if (!nested) {
    throw Error(std::string("model ") + to_string(reduced.model) + " is not nested in " + to_string(full.model));
  }
  if (full.model == TrendModel::full && reduced.model != TrendModel::full &&
      full.conference_a != reduced.conference_a) {
    throw Error("fits use different reference conferences");
  }
  LrtResult out;
  out.dof = static_cast<int>(full.coefficients.size() - reduced.coefficients.size());
  out.stat = std::max(0.0, 2.0 * (full.loglik_ml - reduced.loglik_ml));
  out.p = out.dof == 0 ? 1.0 : stats::chi_squared_sf(out.stat, out.dof);
  return out;
}

BoundaryTestResult boundary_test_G(const HfaSeries& series, int n_sim, std::uint64_t seed, unsigned threads,
                                   const Phase2Options& options) {
  if (n_sim < 100) throw Error("boundary test needs at least 100 simulations");
  require_random_coef_shape(series);

  const auto prob = make_problem(series);
  const auto observed = solve_random_coefficient(prob);
  BoundaryTestResult out;
  out.n_sim = n_sim;
  out.observed_stat = observed.exact ? 0.0 : std::max(0.0, 2.0 * (observed.eval.loglik - observed.eval_g0.loglik));

  // Null model: common weighted line, G = 0.
  const auto null_fit = fit_fixed_trend(series, TrendModel::common_trend, std::nullopt, options);
  const double b0 = null_fit.coefficients[0].estimate;
  const double b1 = null_fit.coefficients[1].estimate;
  const double sd = std::sqrt(null_fit.sigma2_lambda);

  std::vector<double> stats(static_cast<std::size_t>(n_sim), std::numeric_limits<double>::quiet_NaN());
  parallel_for(stats.size(), threads, [&](std::size_t s) {
    Engine engine = make_engine(seed, s, 11);
    HfaSeries sim = series;
    for (auto& r : sim.rows) {
      r.lambda_hat = b0 + b1 * (r.year - options.time_origin) + sd * r.se * standard_normal(engine);
    }
    try {
      const auto sol = solve_random_coefficient(make_problem(sim));
      if (!sol.exact) stats[s] = std::max(0.0, 2.0 * (sol.eval.loglik - sol.eval_g0.loglik));
    } catch (const Error&) {
    }
  });

  int valid = 0;
  int exceed = 0;
  const double tol = 1e-9 * (1.0 + out.observed_stat);
  for (double v : stats) {
    if (!std::isfinite(v)) {
      ++out.failures;
      continue;
    }
    ++valid;
    if (v >= out.observed_stat - tol) ++exceed;
  }
  if (static_cast<double>(out.failures) > 0.05 * n_sim) {
    throw Error(std::to_string(out.failures) + " of " + std::to_string(n_sim) +
                " null refits failed (limit 5%)");
  }
  out.p = (1.0 + exceed) / (valid + 1.0);
  return out;
}

std::vector<FittedPoint> fitted_lines(const HfaSeries& series, const RandomCoefFit& fit) {
  std::map<std::string, ConferenceBlup> blups;
  for (const auto& b : fit.blups) blups[b.conference] = b;
  std::vector<FittedPoint> out;
  for (const auto& r : series.rows) {
    const auto it = blups.find(r.conference);
    const double b0 = it == blups.end() ? 0.0 : it->second.intercept;
    const double b1 = it == blups.end() ? 0.0 : it->second.slope;
    const double t = r.year - fit.time_origin;
    out.push_back({r.conference, r.year, r.lambda_hat,
                   fit.alpha0.estimate + b0 + (fit.alpha1.estimate + b1) * t});
  }
  return out;
}

std::vector<FittedPoint> fitted_lines(const HfaSeries& series, const FixedTrendFit& fit,
                                      const Phase2Options& options) {
  auto coef = [&fit](const char* name) {
    const auto* c = fit.find(name);
    return c ? c->estimate : 0.0;
  };
  std::vector<FittedPoint> out;
  for (const auto& r : series.rows) {
    const double t = r.year - options.time_origin;
    const bool is_b = fit.model != TrendModel::common_trend && r.conference == fit.conference_b;
    double v = coef("beta0A") + coef("beta1A") * t;
    if (is_b) v += coef("beta0B") + coef("beta1B") * t;
    out.push_back({r.conference, r.year, r.lambda_hat, v});
  }
  return out;
}

}  // namespace hfa
