#include "hfa/simulation.hpp"

#include <cmath>
#include <string>

#include "hfa/error.hpp"
#include "hfa/fixed_model.hpp"
#include "hfa/parallel.hpp"
#include "hfa/random.hpp"
#include "hfa/stats.hpp"

namespace hfa {

namespace {

struct ReplicateResult {
  bool ok = false;
  double lambda_fixed = 0.0;
  double lambda_mixed = 0.0;
  bool covered_fixed = false;
  bool covered_mixed = false;
  bool converged = true;
};

double mc_se(const std::vector<double>& draws) {
  if (draws.size() < 2) return 0.0;
  return std::sqrt(stats::variance(draws) / static_cast<double>(draws.size()));
}

std::optional<double> t_p(const std::vector<double>& draws, double mu0) {
  const auto t = stats::one_sample_t_test(draws, mu0);
  if (!t) return std::nullopt;
  return t->p_value;
}

}  // namespace

SimulationReport run_resampling(const ScheduleMatrix& schedule, const MixedFit& base_fit,
                                const SimSpec& spec, unsigned threads, const EMConfig& em) {
  if (spec.n_reps < 1) throw Error("n_reps must be at least 1");
  if (base_fit.boundary) throw Error("base fit is on the boundary (sigma2_g = 0); nothing to resample");
  if (base_fit.eta_blup.size() != schedule.n_teams()) throw Error("base fit does not match schedule");

  const FixedModelSolver fixed(schedule);
  const MixedModelSolver mixed(schedule);
  const Eigen::VectorXd residuals = mixed.conditional_residuals(schedule.margins, base_fit);
  const Eigen::VectorXd& eta_hat = base_fit.eta_blup;
  const Eigen::Index n = schedule.n_games();

  std::vector<ReplicateResult> results(static_cast<std::size_t>(spec.n_reps));
  parallel_for(results.size(), threads, [&](std::size_t r) {
    Engine engine = make_engine(spec.seed, r);
    const Eigen::VectorXd eta =
        spec.mode == ResampleMode::shuffled_teams ? permuted(eta_hat, engine) : eta_hat;
    const Eigen::VectorXd noise = resampled(residuals, engine);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(n, spec.lambda0) + schedule.design * eta + noise;

    ReplicateResult& out = results[r];
    try {
      const FixedFit ff = fixed.fit(y);
      const MixedFit mf = mixed.fit(y, em);
      out.lambda_fixed = ff.lambda_hat;
      out.lambda_mixed = mf.lambda_hat;
      out.covered_fixed = ff.covers(spec.lambda0);
      out.covered_mixed = mf.covers(spec.lambda0);
      out.converged = mf.converged;
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
  });

  SimulationReport report;
  int covered_f = 0;
  int covered_m = 0;
  for (const auto& r : results) {
    if (!r.ok) {
      ++report.failures;
      continue;
    }
    report.lambda_draws_fixed.push_back(r.lambda_fixed);
    report.lambda_draws_mixed.push_back(r.lambda_mixed);
    report.covered_fixed.push_back(r.covered_fixed ? 1 : 0);
    report.covered_mixed.push_back(r.covered_mixed ? 1 : 0);
    covered_f += r.covered_fixed ? 1 : 0;
    covered_m += r.covered_mixed ? 1 : 0;
    if (!r.converged) ++report.not_converged;
  }
  if (static_cast<double>(report.failures) > 0.01 * spec.n_reps) {
    throw Error(std::to_string(report.failures) + " of " + std::to_string(spec.n_reps) +
                " replicate fits failed (limit 1%)");
  }

  const auto kept = static_cast<double>(report.lambda_draws_fixed.size());
  report.mean_fixed = stats::mean(report.lambda_draws_fixed);
  report.mean_mixed = stats::mean(report.lambda_draws_mixed);
  report.mc_se_fixed = mc_se(report.lambda_draws_fixed);
  report.mc_se_mixed = mc_se(report.lambda_draws_mixed);
  report.coverage_fixed = kept > 0 ? covered_f / kept : 0.0;
  report.coverage_mixed = kept > 0 ? covered_m / kept : 0.0;
  report.t_p_fixed = t_p(report.lambda_draws_fixed, spec.lambda0);
  report.t_p_mixed = t_p(report.lambda_draws_mixed, spec.lambda0);
  return report;
}

League generate_league(const LeagueSpec& spec) {
  if (spec.n_teams < 3) throw Error("league needs at least 3 teams");
  if (spec.games_per_team < 1) throw Error("games_per_team must be positive");
  if (!(spec.home_bias >= 0.0 && spec.home_bias <= 1.0)) throw Error("home_bias must lie in [0, 1]");
  if (spec.sigma_g < 0.0) throw Error("sigma_g must be nonnegative");

  const int n = spec.n_teams;
  Engine strength_engine = make_engine(spec.seed, 0, 1);
  Engine host_engine = make_engine(spec.seed, 0, 2);
  League league;
  league.eta_true = normal_vector(strength_engine, n, spec.sigma_g);

  // Circle method; `n` acts as the bye slot when the team count is odd.
  const int m = n % 2 == 0 ? n : n + 1;
  std::vector<int> ring(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) ring[static_cast<std::size_t>(i)] = i;
  const auto target = static_cast<std::size_t>(static_cast<long long>(n) * spec.games_per_team / 2);

  std::vector<std::pair<int, int>> pairings;
  while (pairings.size() < target) {
    for (int i = 0; i < m / 2 && pairings.size() < target; ++i) {
      const int a = ring[static_cast<std::size_t>(i)];
      const int b = ring[static_cast<std::size_t>(m - 1 - i)];
      if (a < n && b < n) pairings.emplace_back(a, b);
    }
    // Rotate every slot except the first.
    const int last = ring.back();
    for (int i = m - 1; i > 1; --i) ring[static_cast<std::size_t>(i)] = ring[static_cast<std::size_t>(i - 1)];
    ring[1] = last;
  }

  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pairings.size()), n);
  for (std::size_t g = 0; g < pairings.size(); ++g) {
    const auto [a, b] = pairings[g];
    const bool a_stronger = league.eta_true(a) > league.eta_true(b);
    const int stronger = a_stronger ? a : b;
    const int weaker = a_stronger ? b : a;
    const bool stronger_hosts = uniform01(host_engine) < spec.home_bias;
    const auto row = static_cast<Eigen::Index>(g);
    z(row, stronger_hosts ? stronger : weaker) = 1.0;
    z(row, stronger_hosts ? weaker : stronger) = -1.0;
  }

  const int width = static_cast<int>(std::to_string(n - 1).size());
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    std::string digits = std::to_string(i);
    names.push_back("T" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits);
  }
  const auto rows = z.rows();
  league.schedule = ScheduleMatrix::from_design(std::move(z), Eigen::VectorXd::Zero(rows),
                                                std::move(names), "synthetic league");
  return league;
}

Eigen::VectorXd simulate_margins(const ScheduleMatrix& schedule, const Eigen::VectorXd& eta,
                                 double lambda, double sigma, std::uint64_t seed) {
  if (eta.size() != schedule.n_teams()) throw Error("eta length does not match schedule");
  Engine engine = make_engine(seed, 0, 3);
  return Eigen::VectorXd::Constant(schedule.n_games(), lambda) + schedule.design * eta +
         normal_vector(engine, schedule.n_games(), sigma);
}

ResamplingSummary summarize_by_year(const std::vector<std::pair<int, SimulationReport>>& reports,
                                    double lambda0) {
  if (reports.empty()) throw Error("no simulation reports to summarise");

  ResamplingSummary out;
  std::vector<double> m_fixed;
  std::vector<double> m_mixed;
  std::vector<double> c_fixed;
  std::vector<double> c_mixed;
  for (const auto& [year, rep] : reports) {
    out.rows.push_back({year, rep.mean_fixed, rep.mean_mixed, rep.coverage_fixed, rep.coverage_mixed});
    m_fixed.push_back(rep.mean_fixed);
    m_mixed.push_back(rep.mean_mixed);
    c_fixed.push_back(rep.coverage_fixed);
    c_mixed.push_back(rep.coverage_mixed);
  }
  out.fixed = {stats::mean(m_fixed), stats::mean(c_fixed), t_p(m_fixed, lambda0)};
  out.mixed = {stats::mean(m_mixed), stats::mean(c_mixed), t_p(m_mixed, lambda0)};
  return out;
}

}  // namespace hfa
