#include "cli.hpp"

#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "hfa/error.hpp"
#include "output.hpp"

namespace hfa::cli {

namespace {

void add_scope_flags(CLI::App* cmd, ScopeOptions& scope) {
  cmd->add_option("--games", scope.games, "Games CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--conferences", scope.conferences, "Conference membership CSV")->check(CLI::ExistingFile);
  cmd->add_flag("--per-conference", scope.per_conference, "Fit each conference's intraconference games");
  cmd->add_flag("--full-season", scope.full_season, "Fit all games of each season together");
  cmd->add_flag("--keep-neutral", scope.keep_neutral, "Keep neutral-site games");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Home-field advantage estimation, schedule-bias diagnostics and trend models", "hfa"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Phase1Options phase1;
  auto* p1 = app.add_subcommand("phase1", "Per-season HFA estimates (hfa_series.csv and per-fit JSON)");
  add_scope_flags(p1, phase1.scope);
  p1->add_option("--model", phase1.model, "fixed, mixed or both")->check(CLI::IsMember({"fixed", "mixed", "both"}));
  p1->add_option("--output-dir,-o", phase1.output_dir, "Output directory");

  DiagnoseOptions diagnose;
  auto* dg = app.add_subcommand("diagnose", "Schedule-bias chi-square diagnostics (diagnostics.csv)");
  add_scope_flags(dg, diagnose.scope);
  dg->add_option("--output-dir,-o", diagnose.output_dir, "Output directory");

  SimulateOptions simulate;
  auto* sm = app.add_subcommand("simulate", "Resampling study of bias and coverage");
  auto* games_opt = sm->add_option("--games", simulate.games, "Games CSV")->check(CLI::ExistingFile);
  sm->add_option("--conferences", simulate.conferences, "Conference membership CSV")->check(CLI::ExistingFile);
  sm->add_option("--conference", simulate.conference, "Use one conference's intraconference games");
  sm->add_option("--season", simulate.season, "Use a single season");
  sm->add_flag("--keep-neutral", simulate.keep_neutral, "Keep neutral-site games");
  auto* league_teams =
      sm->add_option("--league-teams", simulate.league_teams, "Synthetic league size")->check(CLI::Range(3, 100000));
  sm->add_option("--league-games", simulate.league_games_per_team, "Games per team")->check(CLI::PositiveNumber);
  sm->add_option("--league-sigma-g", simulate.league_sigma_g, "Team-effect SD")->check(CLI::NonNegativeNumber);
  sm->add_option("--league-sigma", simulate.league_sigma, "Game noise SD")->check(CLI::NonNegativeNumber);
  sm->add_option("--league-home-bias", simulate.league_home_bias, "P(stronger team hosts)")->check(CLI::Range(0.0, 1.0));
  sm->add_option("--league-lambda", simulate.league_lambda, "True HFA of the synthetic base data");
  sm->add_option("--seasons", simulate.seasons, "Number of synthetic seasons");
  games_opt->excludes(league_teams);
  sm->add_option("--mode", simulate.mode, "fixed, shuffled or both")->check(CLI::IsMember({"fixed", "shuffled", "both"}));
  sm->add_option("--reps", simulate.reps, "Replicates per season");
  sm->add_option("--seed", simulate.seed, "Master seed");
  sm->add_option("--lambda0", simulate.lambda0, "HFA used to build simulated responses");
  sm->add_option("--threads", simulate.threads, "Worker threads (0 = all cores)");
  sm->add_option("--output-dir,-o", simulate.output_dir, "Output directory");

  Phase2Options phase2;
  auto* p2 = app.add_subcommand("phase2", "Trend models over an HFA series");
  p2->add_option("--series", phase2.series, "HFA series CSV")->required()->check(CLI::ExistingFile);
  p2->add_option("--design", phase2.design, "random-coef or fixed-trend")
      ->check(CLI::IsMember({"random-coef", "fixed-trend"}));
  p2->add_option("--boundary-sims", phase2.boundary_sims, "Simulations for the G = 0 test (0 skips)");
  p2->add_option("--reference-conference", phase2.reference_conference, "Conference coded as A");
  p2->add_option("--model", phase2.model, "Row filter for series files holding several models");
  p2->add_option("--seed", phase2.seed, "Master seed");
  p2->add_option("--threads", phase2.threads, "Worker threads (0 = all cores)");
  p2->add_option("--time-origin", phase2.time_origin, "Year coded as time 0");
  p2->add_option("--output-dir,-o", phase2.output_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return usage_error;
  }

  try {
    if (p1->parsed()) cmd_phase1(phase1, err);
    if (dg->parsed()) cmd_diagnose(diagnose, err);
    if (sm->parsed()) cmd_simulate(simulate, err);
    if (p2->parsed()) cmd_phase2(phase2, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return usage_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return runtime_failure;
  }
  return ok;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"hfa"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hfa::cli
