#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace hfa::cli {

/// Bad flag combinations detected after parsing; mapped to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScopeOptions {
  std::filesystem::path games;
  std::optional<std::filesystem::path> conferences;
  bool per_conference = false;
  bool full_season = false;
  bool keep_neutral = false;
};

struct Phase1Options {
  ScopeOptions scope;
  std::string model = "both";  // fixed | mixed | both
  std::filesystem::path output_dir = ".";
};

struct DiagnoseOptions {
  ScopeOptions scope;
  std::filesystem::path output_dir = ".";
};

struct SimulateOptions {
  std::optional<std::filesystem::path> games;
  std::optional<std::filesystem::path> conferences;
  std::optional<std::string> conference;  // restrict to one conference's games
  std::optional<int> season;
  bool keep_neutral = false;

  // Synthetic leagues, used when no games file is given.
  int league_teams = 20;
  int league_games_per_team = 10;
  double league_sigma_g = 5.0;
  double league_sigma = 10.0;
  double league_home_bias = 0.5;
  double league_lambda = 3.0;
  int seasons = 1;

  std::string mode = "both";  // fixed | shuffled | both
  int reps = 2000;
  std::optional<std::uint64_t> seed;
  double lambda0 = 3.0;
  unsigned threads = 1;
  std::filesystem::path output_dir = ".";
};

struct Phase2Options {
  std::filesystem::path series;
  std::string design = "random-coef";  // random-coef | fixed-trend
  int boundary_sims = 1000;            // 0 skips the G = 0 test
  std::optional<std::string> reference_conference;
  std::optional<std::string> model;  // row filter for phase1 output with both models
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  int time_origin = 2017;
  std::filesystem::path output_dir = ".";
};

void cmd_phase1(const Phase1Options& options, std::ostream& err);
void cmd_diagnose(const DiagnoseOptions& options, std::ostream& err);
void cmd_simulate(const SimulateOptions& options, std::ostream& err);
void cmd_phase2(const Phase2Options& options, std::ostream& err);

}  // namespace hfa::cli
