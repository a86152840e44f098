#include <cmath>

#include <gtest/gtest.h>

#include "hfa/error.hpp"
#include "hfa/fixed_model.hpp"
#include "hfa/stats.hpp"
#include "oracles.hpp"

namespace hfa {
namespace {

ScheduleMatrix make(const std::vector<std::pair<int, int>>& games, const std::vector<double>& d, int n_teams) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(games.size()), n_teams);
  for (std::size_t i = 0; i < games.size(); ++i) {
    z(static_cast<Eigen::Index>(i), games[i].first) = 1;
    z(static_cast<Eigen::Index>(i), games[i].second) = -1;
  }
  std::vector<std::string> names;
  for (int i = 0; i < n_teams; ++i) names.push_back(std::string(1, static_cast<char>('A' + i)));
  return ScheduleMatrix::from_design(z, Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())),
                                     names);
}

TEST(FitFixed, HomeAndHomeGivesMean) {
  // A hosts B (d = 5), B hosts A (d = 1).
  const auto sm = make({{0, 1}, {1, 0}}, {5, 1}, 2);
  const auto est = FixedModelSolver(sm).estimate(sm.margins);
  EXPECT_NEAR(est.lambda_hat, 3.0, 1e-12);
  // With a third game the model has a residual degree of freedom.
  const auto sm3 = make({{0, 1}, {1, 0}, {0, 1}}, {5, 1, 4}, 2);
  const auto fit = fit_fixed(sm3);
  EXPECT_EQ(fit.dof_resid, 1);
  EXPECT_EQ(fit.rank_W, 2);
}

TEST(FitFixed, ThreeGameSystemSolvedByHand) {
  // lambda + x = 4, lambda + x + y = 6, lambda + y = 2 forces lambda = 0.
  const auto sm = make({{0, 1}, {0, 2}, {1, 2}}, {4, 6, 2}, 3);
  const auto est = FixedModelSolver(sm).estimate(sm.margins);
  EXPECT_NEAR(est.lambda_hat, 0.0, 1e-12);
  EXPECT_NEAR(est.rss, 0.0, 1e-20);
  // No residual degrees of freedom remain for sigma^2.
  try {
    fit_fixed(sm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("saturated model"), std::string::npos);
  }
}

TEST(FitFixed, NotEstimable) {
  const auto sm = make({{0, 1}, {0, 1}}, {3, 5}, 2);
  try {
    fit_fixed(sm);
    FAIL();
  } catch (const EstimabilityError& e) {
    EXPECT_STREQ(e.what(), "HFA not estimable");
  }
}

TEST(FitFixed, NoiselessBalancedRecovery) {
  Engine rng = make_engine(3, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto base = testing::random_balanced_schedule(rng, 7, 6);
    const Eigen::VectorXd beta = normal_vector(rng, base.n_teams(), 4.0);
    const double c = 10.0 * uniform01(rng) - 5.0;
    const auto sm = base.with_margins(Eigen::VectorXd::Constant(base.n_games(), c) + base.design * beta);
    const auto fit = fit_fixed(sm);
    EXPECT_NEAR(fit.lambda_hat, c, 1e-10);
    EXPECT_NEAR(fit.rss, 0.0, 1e-16 * (1.0 + sm.margins.squaredNorm()));
  }
}

TEST(FitFixed, StandardErrorAndIntervalFromNormalEquations) {
  Engine rng = make_engine(4, 0);
  const auto base = testing::random_schedule(rng, 6, 40);
  ASSERT_TRUE(check_estimability(base).lambda_estimable);
  const auto sm = base.with_margins(normal_vector(rng, base.n_games(), 10.0).array() + 3.0);
  const auto fit = fit_fixed(sm);
  const auto ols = testing::reference_team_ols(sm.design, sm.margins);

  // Oracle for se: reduced full-rank design, (X'X)^-1 from a dense inverse.
  const auto comp = testing::team_components(sm.design);
  ASSERT_EQ(std::count(comp.begin(), comp.end(), comp[0]), static_cast<long>(comp.size()));
  Eigen::MatrixXd x(sm.n_games(), sm.n_teams());
  x.col(0).setOnes();
  x.rightCols(sm.n_teams() - 1) = sm.design.rightCols(sm.n_teams() - 1);
  const double dof = static_cast<double>(sm.n_games() - sm.n_teams());
  const double s2 = ols.rss / dof;
  const double se = std::sqrt(s2 * (x.transpose() * x).inverse()(0, 0));
  EXPECT_NEAR(fit.sigma2_hat, s2, 1e-10 * s2);
  EXPECT_NEAR(fit.se_lambda, se, 1e-10 * se);
  const double q = stats::t_quantile(0.975, dof);
  EXPECT_NEAR(fit.ci_lower, fit.lambda_hat - q * se, 1e-9);
  EXPECT_NEAR(fit.ci_upper, fit.lambda_hat + q * se, 1e-9);
}

TEST(FitFixedProperty, ResidualsOrthogonalToDesign) {
  Engine rng = make_engine(5, 0);
  for (int rep = 0; rep < 30; ++rep) {
    const auto base = testing::random_schedule(rng, 8, 30);
    if (!check_estimability(base).lambda_estimable) continue;
    const auto sm = base.with_margins(normal_vector(rng, base.n_games(), 12.0));
    const FixedModelSolver solver(sm);
    const auto est = solver.estimate(sm.margins);
    const Eigen::VectorXd r = sm.margins - est.lambda_hat * Eigen::VectorXd::Ones(sm.n_games()) - sm.design * est.beta_hat;
    const double scale = sm.margins.cwiseAbs().maxCoeff() * static_cast<double>(sm.n_games());
    EXPECT_LT((solver.design_with_intercept().transpose() * r).cwiseAbs().maxCoeff(), 1e-6 * scale);
  }
}

TEST(FitFixedProperty, ConstantShift) {
  Engine rng = make_engine(6, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto base = testing::random_schedule(rng, 6, 25);
    if (!check_estimability(base).lambda_estimable) continue;
    const auto sm = base.with_margins(normal_vector(rng, base.n_games(), 8.0));
    const FixedModelSolver solver(sm);
    const auto a = solver.estimate(sm.margins);
    const auto b = solver.estimate(sm.margins.array() + 2.5);
    const Eigen::VectorXd fa = a.lambda_hat * Eigen::VectorXd::Ones(sm.n_games()) + sm.design * a.beta_hat;
    const Eigen::VectorXd fb = b.lambda_hat * Eigen::VectorXd::Ones(sm.n_games()) + sm.design * b.beta_hat;
    EXPECT_LT((fb - fa - Eigen::VectorXd::Constant(sm.n_games(), 2.5)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(b.rss, a.rss, 1e-8 * (1.0 + a.rss));
  }
  // Balanced: lambda moves by exactly the shift.
  const auto bal = testing::random_balanced_schedule(rng, 5, 4);
  const auto sm = bal.with_margins(normal_vector(rng, bal.n_games(), 8.0));
  const FixedModelSolver solver(sm);
  EXPECT_NEAR(solver.estimate(sm.margins.array() + 2.5).lambda_hat - solver.estimate(sm.margins).lambda_hat, 2.5,
              1e-10);
  EXPECT_NEAR(solver.estimate(sm.margins).lambda_hat, sm.margins.mean(), 1e-10);
}

TEST(FitFixedProperty, GaugeInvarianceAgainstReferenceTeamOls) {
  Engine rng = make_engine(7, 0);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const auto base = testing::random_schedule(rng, 3 + static_cast<int>(uniform_index(rng, 8)),
                                               5 + static_cast<int>(uniform_index(rng, 40)));
    if (!check_estimability(base).lambda_estimable) continue;
    const auto sm = base.with_margins(normal_vector(rng, base.n_games(), 10.0).array() + 3.0);
    const auto est = FixedModelSolver(sm).estimate(sm.margins);
    const auto ols = testing::reference_team_ols(sm.design, sm.margins);
    EXPECT_NEAR(est.lambda_hat, ols.lambda_hat, 1e-8);
    const auto comp = testing::team_components(sm.design);
    for (Eigen::Index i = 0; i < sm.n_teams(); ++i) {
      for (Eigen::Index j = i + 1; j < sm.n_teams(); ++j) {
        if (comp[static_cast<std::size_t>(i)] != comp[static_cast<std::size_t>(j)]) continue;
        EXPECT_NEAR(est.beta_hat(i) - est.beta_hat(j), ols.beta(i) - ols.beta(j), 1e-8);
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(PairwiseDifference, IdentityContrast) {
  const auto sm = make({{0, 1}, {1, 0}, {0, 1}, {1, 2}, {2, 0}}, {5, 1, 4, 2, 7}, 3);
  const auto fit = fit_fixed(sm);
  const auto pd = pairwise_difference(fit, sm, 1, 1);
  EXPECT_EQ(pd.estimate, 0.0);
  EXPECT_EQ(pd.se, 0.0);
}

TEST(PairwiseDifference, NoiselessDifference) {
  Engine rng = make_engine(8, 0);
  const auto base = testing::random_balanced_schedule(rng, 4, 5);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(4);
  beta(0) = 5.0;
  beta(2) = -1.0;
  const auto sm = base.with_margins(Eigen::VectorXd::Constant(base.n_games(), 3.0) + base.design * beta);
  const auto fit = fit_fixed(sm);
  EXPECT_NEAR(pairwise_difference(fit, sm, 0, 1).estimate, 5.0, 1e-10);
  EXPECT_NEAR(pairwise_difference(fit, sm, 2, 0).estimate, -6.0, 1e-10);
}

TEST(PairwiseDifference, StandardErrorMatchesReducedDesign) {
  Engine rng = make_engine(9, 0);
  const auto base = testing::random_schedule(rng, 5, 40);
  ASSERT_EQ(testing::lu_rank(base.design), 4);
  const auto sm = base.with_margins(normal_vector(rng, base.n_games(), 10.0));
  const auto fit = fit_fixed(sm);
  // Team 0 as reference: beta_1 - beta_2 is coefficient 1 minus coefficient 2.
  Eigen::MatrixXd x(sm.n_games(), 5);
  x.col(0).setOnes();
  x.rightCols(4) = sm.design.rightCols(4);
  const Eigen::MatrixXd cov = fit.sigma2_hat * (x.transpose() * x).inverse();
  const double var = cov(1, 1) + cov(2, 2) - 2.0 * cov(1, 2);
  EXPECT_NEAR(pairwise_difference(fit, sm, 1, 2).se, std::sqrt(var), 1e-10);
}

TEST(PairwiseDifference, DisconnectedTeamsThrow) {
  const auto sm = make({{0, 1}, {1, 0}, {0, 1}, {2, 3}, {3, 2}}, {5, 1, 4, 2, 3}, 4);
  const auto fit = fit_fixed(sm);
  EXPECT_THROW(pairwise_difference(fit, sm, 0, 2), EstimabilityError);
  EXPECT_NO_THROW(pairwise_difference(fit, sm, 2, 3));
}

}  // namespace
}  // namespace hfa
