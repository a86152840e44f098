#pragma once

// Resampling studies of estimator bias and interval coverage, and a synthetic
// league generator with a knob for strength-dependent hosting.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hfa/mixed_model.hpp"
#include "hfa/schedule.hpp"

namespace hfa {

enum class ResampleMode {
  fixed_schedule,  // y = lambda0 1 + Z eta_hat + s1(e_hat)
  shuffled_teams   // y = lambda0 1 + Z s0(eta_hat) + s1(e_hat)
};

struct SimSpec {
  double lambda0 = 3.0;
  int n_reps = 2000;
  std::uint64_t seed = 0;
  ResampleMode mode = ResampleMode::fixed_schedule;
};

struct SimulationReport {
  std::vector<double> lambda_draws_fixed;
  std::vector<double> lambda_draws_mixed;
  std::vector<char> covered_fixed;  // per replicate, by index
  std::vector<char> covered_mixed;
  double mean_fixed = 0.0;
  double mean_mixed = 0.0;
  double mc_se_fixed = 0.0;  // sd(draws) / sqrt(draws)
  double mc_se_mixed = 0.0;
  double coverage_fixed = 0.0;
  double coverage_mixed = 0.0;
  std::optional<double> t_p_fixed;  // empty when the draws have zero variance
  std::optional<double> t_p_mixed;
  int failures = 0;           // replicates excluded after a fit error
  int not_converged = 0;      // mixed fits that hit max_iter (kept)
};

/// Refits both models to n_reps resampled response vectors built from the base
/// mixed fit. Throws when more than 1% of replicates fail.
SimulationReport run_resampling(const ScheduleMatrix& schedule, const MixedFit& base_fit,
                                const SimSpec& spec, unsigned threads = 1,
                                const EMConfig& em = {});

struct LeagueSpec {
  int n_teams = 20;
  int games_per_team = 10;
  double sigma_g = 5.0;
  double sigma = 10.0;
  double home_bias = 0.5;  // probability that the stronger team of a pairing hosts
  std::uint64_t seed = 0;
};

struct League {
  ScheduleMatrix schedule;  // margins are zero; see simulate_margins
  Eigen::VectorXd eta_true;
};

/// Pairings come from a circle-method round robin, repeated as needed and cut
/// after n_teams * games_per_team / 2 games. Hosts are then assigned by home_bias.
League generate_league(const LeagueSpec& spec);

/// lambda 1 + Z eta + N(0, sigma^2) noise, seeded.
Eigen::VectorXd simulate_margins(const ScheduleMatrix& schedule, const Eigen::VectorXd& eta,
                                 double lambda, double sigma, std::uint64_t seed);

struct ModelSummary {
  double mean = 0.0;               // mean of the per-year means
  double coverage = 0.0;           // mean of the per-year coverages
  std::optional<double> p_value;   // t-test of per-year means against lambda0
};

struct YearSummaryRow {
  int year = 0;
  double mean_fixed = 0.0;
  double mean_mixed = 0.0;
  double coverage_fixed = 0.0;
  double coverage_mixed = 0.0;
};

struct ResamplingSummary {
  std::vector<YearSummaryRow> rows;
  ModelSummary fixed;
  ModelSummary mixed;
};

ResamplingSummary summarize_by_year(const std::vector<std::pair<int, SimulationReport>>& reports,
                                    double lambda0);

}  // namespace hfa
