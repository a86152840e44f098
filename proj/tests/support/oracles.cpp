#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hfa::testing {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

std::vector<std::string> team_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back((i < 10 ? "T0" : "T") + std::to_string(i));
  return names;
}

void add_game(std::vector<std::pair<int, int>>& games, int home, int away) { games.emplace_back(home, away); }

ScheduleMatrix assemble(const std::vector<std::pair<int, int>>& games, int n_teams) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(games.size()), n_teams);
  for (std::size_t g = 0; g < games.size(); ++g) {
    z(static_cast<Eigen::Index>(g), games[g].first) = 1.0;
    z(static_cast<Eigen::Index>(g), games[g].second) = -1.0;
  }
  const auto n = z.rows();
  return ScheduleMatrix::from_design(std::move(z), Eigen::VectorXd::Zero(n), team_names(n_teams));
}

Eigen::Matrix2d psd_sqrt(const Eigen::Matrix2d& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(g);
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace

ScheduleMatrix random_balanced_schedule(Engine& rng, int n_teams, int n_blocks) {
  std::vector<std::pair<int, int>> games;
  std::vector<int> order(static_cast<std::size_t>(n_teams));
  std::iota(order.begin(), order.end(), 0);

  // A cycle through every team keeps all columns in use.
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);
  for (int i = 0; i < n_teams; ++i) add_game(games, order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>((i + 1) % n_teams)]);

  for (int b = 0; b < n_blocks; ++b) {
    if (uniform01(rng) < 0.5) {
      const int a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_teams)));
      int c = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_teams - 1)));
      if (c >= a) ++c;
      add_game(games, a, c);
      add_game(games, c, a);
    } else {
      const int k = 3 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_teams - 2)));
      for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);
      for (int i = 0; i < k; ++i) add_game(games, order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>((i + 1) % k)]);
    }
  }
  return assemble(games, n_teams);
}

ScheduleMatrix random_schedule(Engine& rng, int n_teams, int n_games) {
  std::vector<std::pair<int, int>> games;
  for (int g = 0; g < n_games; ++g) {
    const int a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_teams)));
    int b = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_teams - 1)));
    if (b >= a) ++b;
    add_game(games, a, b);
  }
  return assemble(games, n_teams);
}

std::vector<int> team_components(const Eigen::MatrixXd& design) {
  const auto n = static_cast<int>(design.cols());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (Eigen::Index r = 0; r < design.rows(); ++r) {
    int a = -1;
    int b = -1;
    for (Eigen::Index c = 0; c < design.cols(); ++c) {
      if (design(r, c) != 0.0) (a < 0 ? a : b) = static_cast<int>(c);
    }
    parent[static_cast<std::size_t>(find(a))] = find(b);
  }
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = find(i);
  return out;
}

OlsOracle reference_team_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& d) {
  const auto comp = team_components(design);
  std::vector<Eigen::Index> kept;
  std::vector<int> seen;
  for (Eigen::Index c = 0; c < design.cols(); ++c) {
    const int id = comp[static_cast<std::size_t>(c)];
    if (std::find(seen.begin(), seen.end(), id) == seen.end()) {
      seen.push_back(id);  // first team of the component is the reference
      continue;
    }
    kept.push_back(c);
  }
  Eigen::MatrixXd x(design.rows(), static_cast<Eigen::Index>(kept.size()) + 1);
  x.col(0).setOnes();
  for (std::size_t k = 0; k < kept.size(); ++k) x.col(static_cast<Eigen::Index>(k) + 1) = design.col(kept[k]);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::VectorXd coef = qr.solve(d);
  OlsOracle out;
  out.rank = qr.rank();
  out.lambda_hat = coef(0);
  out.beta = Eigen::VectorXd::Zero(design.cols());
  for (std::size_t k = 0; k < kept.size(); ++k) out.beta(kept[k]) = coef(static_cast<Eigen::Index>(k) + 1);
  out.rss = (d - x * coef).squaredNorm();
  return out;
}

Eigen::Index lu_rank(const Eigen::MatrixXd& m) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  return lu.rank();
}

bool brute_force_estimable(const Eigen::MatrixXd& design) {
  Eigen::MatrixXd w(design.rows(), design.cols() + 1);
  w.col(0).setOnes();
  w.rightCols(design.cols()) = design;
  return lu_rank(w) == lu_rank(design) + 1;
}

DenseHenderson dense_henderson(const Eigen::MatrixXd& design, const Eigen::VectorXd& d, double ratio) {
  const auto n = design.rows();
  const auto q = design.cols();
  Eigen::MatrixXd w(n, q + 1);
  w.col(0).setOnes();
  w.rightCols(q) = design;
  Eigen::MatrixXd c = w.transpose() * w;
  c.bottomRightCorner(q, q).diagonal().array() += ratio;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
  const Eigen::VectorXd sol = ldlt.solve(w.transpose() * d);
  DenseHenderson out;
  out.lambda_hat = sol(0);
  out.eta = sol.tail(q);
  out.c_inv_lambda = ldlt.solve(Eigen::VectorXd::Unit(q + 1, 0))(0);
  return out;
}

double dense_reml(const Eigen::MatrixXd& design, const Eigen::VectorXd& d, double sigma2_g, double sigma2) {
  const auto n = design.rows();
  const Eigen::MatrixXd v =
      sigma2_g * design * design.transpose() + sigma2 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::LLT<Eigen::MatrixXd> llt(v);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd v1 = llt.solve(ones);
  const double one_v_one = ones.dot(v1);
  const double lambda = v1.dot(d) / one_v_one;
  const Eigen::VectorXd r = d - lambda * ones;
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * ((static_cast<double>(n) - 1.0) * kLog2Pi + log_det + std::log(one_v_one) + r.dot(llt.solve(r)));
}

double intercept_only_reml(const Eigen::VectorXd& d, double sigma2) {
  const double n = static_cast<double>(d.size());
  const double ss = (d.array() - d.mean()).square().sum();
  return -0.5 * ((n - 1.0) * kLog2Pi + n * std::log(sigma2) + std::log(n / sigma2) + ss / sigma2);
}

double dense_trend_reml(const HfaSeries& series, const Eigen::Matrix2d& g, double sigma2, int time_origin) {
  const auto n = static_cast<Eigen::Index>(series.rows.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ri = series.rows[static_cast<std::size_t>(i)];
    x.row(i) << 1.0, ri.year - time_origin;
    y(i) = ri.lambda_hat;
    v(i, i) += sigma2 * ri.se * ri.se;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& rj = series.rows[static_cast<std::size_t>(j)];
      if (ri.conference != rj.conference) continue;
      const Eigen::Vector2d zi(1.0, ri.year - time_origin);
      const Eigen::Vector2d zj(1.0, rj.year - time_origin);
      v(i, j) += zi.dot(g * zj);
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(v);
  const Eigen::MatrixXd vx = llt.solve(x);
  const Eigen::Matrix2d xvx = x.transpose() * vx;
  const Eigen::Vector2d beta = xvx.ldlt().solve(vx.transpose() * y);
  const Eigen::VectorXd r = y - x * beta;
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * ((static_cast<double>(n) - 2.0) * kLog2Pi + log_det + std::log(xvx.determinant()) +
                 r.dot(llt.solve(r)));
}

HfaSeries random_coef_series(Engine& rng, double alpha0, double alpha1, const Eigen::Matrix2d& g, double sigma2,
                             int n_conferences, int first_year, int n_years, double se_lo, double se_hi) {
  HfaSeries s;
  for (int j = 0; j < n_conferences; ++j) {
    const std::string name = (j < 10 ? "C0" : "C") + std::to_string(j);
    for (int y = 0; y < n_years; ++y) {
      s.rows.push_back({first_year + y, name, 0.0, se_lo + (se_hi - se_lo) * uniform01(rng)});
    }
  }
  return redraw_series(rng, s, alpha0, alpha1, g, sigma2);
}

HfaSeries redraw_series(Engine& rng, const HfaSeries& design, double alpha0, double alpha1, const Eigen::Matrix2d& g,
                        double sigma2, int time_origin) {
  const Eigen::Matrix2d root = psd_sqrt(g);
  HfaSeries s = design;
  std::string current;
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (auto& r : s.rows) {
    if (r.conference != current) {
      current = r.conference;
      const Eigen::Vector2d z(standard_normal(rng), standard_normal(rng));
      b = root * z;
    }
    const double t = r.year - time_origin;
    r.lambda_hat = alpha0 + b(0) + (alpha1 + b(1)) * t + std::sqrt(sigma2) * r.se * standard_normal(rng);
  }
  return s;
}

}  // namespace hfa::testing
