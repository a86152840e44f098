#pragma once

// Game records, conference membership and the +/-1 schedule design.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hfa {

struct Game {
  int season = 0;
  std::string date;  // free text, may be empty
  std::string home_team;
  std::string away_team;
  int home_score = 0;
  int away_score = 0;
  bool neutral = false;

  double margin() const { return static_cast<double>(home_score) - away_score; }
};

struct GameSet {
  std::vector<Game> games;
  std::string label;

  bool empty() const { return games.empty(); }
  std::size_t size() const { return games.size(); }
};

/// (season, team) -> conference. A team belongs to at most one conference per season.
class ConferenceMap {
 public:
  /// Throws hfa::Error when (season, team) is already mapped to a different conference.
  void add(int season, const std::string& team, const std::string& conference);
  std::optional<std::string> lookup(int season, const std::string& team) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::pair<int, std::string>, std::string> entries_;
};

/// Reads `season,date,home_team,away_team,home_score,away_score,neutral`.
/// Lines starting with '#' and blank lines are skipped.
GameSet parse_games(std::istream& in);
GameSet parse_games_file(const std::string& path);

/// Reads `season,team,conference`.
ConferenceMap parse_conferences(std::istream& in);
ConferenceMap parse_conferences_file(const std::string& path);

struct IntraconferenceSplit {
  std::map<std::string, GameSet> by_conference;
  std::size_t dropped = 0;          // unmapped team or interconference game
  std::size_t dropped_neutral = 0;  // removed because drop_neutral was set
};

IntraconferenceSplit filter_intraconference(const GameSet& games, const ConferenceMap& conferences,
                                            bool drop_neutral);

/// Groups games by season, preserving row order within each season.
std::map<int, GameSet> split_by_season(const GameSet& games);

GameSet drop_neutral_games(const GameSet& games);

/// Home margins and the n x N schedule design. Row i has +1 in the home team's
/// column and -1 in the away team's column. Immutable once built.
struct ScheduleMatrix {
  Eigen::VectorXd margins;          // d_i = home score - away score
  Eigen::MatrixXd design;           // entries in {-1, 0, +1}
  std::vector<std::string> teams;   // column labels
  Eigen::VectorXi net_home;         // column sums of the design
  std::string label;

  Eigen::Index n_games() const { return design.rows(); }
  Eigen::Index n_teams() const { return design.cols(); }

  /// [1 | design]
  Eigen::MatrixXd with_intercept() const;

  /// Validates the +/-1 row structure and computes net_home.
  static ScheduleMatrix from_design(Eigen::MatrixXd design, Eigen::VectorXd margins,
                                    std::vector<std::string> teams, std::string label = {});

  /// Same schedule, different response.
  ScheduleMatrix with_margins(Eigen::VectorXd margins) const;
};

/// Teams are sorted lexicographically; row i encodes game i. Throws on an empty set.
ScheduleMatrix build_design(const GameSet& games);

struct EstimabilityReport {
  bool lambda_estimable = false;
  Eigen::Index rank_W = 0;
};

/// lambda is estimable when e1' (W+ W) reproduces e1' to within `tol` in the
/// max norm, with W = [1 | Z].
EstimabilityReport check_estimability(const ScheduleMatrix& schedule, double tol = 1e-8);

}  // namespace hfa
