#include "hfa/schedule.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "csv.hpp"
#include "hfa/error.hpp"
#include "hfa/linalg.hpp"

namespace hfa {

namespace {

const std::vector<std::string> kGameColumns = {"season",     "date",       "home_team", "away_team",
                                               "home_score", "away_score", "neutral"};
const std::vector<std::string> kConferenceColumns = {"season", "team", "conference"};

bool parse_flag(const std::string& s, std::size_t line) {
  if (s == "0" || s == "false" || s == "FALSE" || s == "False" || s.empty()) return false;
  if (s == "1" || s == "true" || s == "TRUE" || s == "True") return true;
  throw ParseError(line, "neutral flag '" + s + "' is not 0/1");
}

int parse_int_field(const std::string& s, const char* name, std::size_t line) {
  const auto v = csv::to_integer(s);
  if (!v) throw ParseError(line, std::string(name) + " '" + s + "' is not an integer");
  return static_cast<int>(*v);
}

}  // namespace

void ConferenceMap::add(int season, const std::string& team, const std::string& conference) {
  auto [it, inserted] = entries_.try_emplace({season, team}, conference);
  if (!inserted && it->second != conference) {
    throw Error("team '" + team + "' mapped to both '" + it->second + "' and '" + conference +
                "' in season " + std::to_string(season));
  }
}

std::optional<std::string> ConferenceMap::lookup(int season, const std::string& team) const {
  const auto it = entries_.find({season, team});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

GameSet parse_games(std::istream& in) {
  csv::LineReader reader(in);
  reader.expect_header(kGameColumns);

  GameSet out;
  std::string line;
  while (reader.next(line)) {
    const auto n = reader.line_no();
    const auto f = csv::split(line);
    if (f.size() != kGameColumns.size()) {
      throw ParseError(n, "expected 7 fields, found " + std::to_string(f.size()));
    }
    Game g;
    g.season = parse_int_field(f[0], "season", n);
    g.date = f[1];
    g.home_team = f[2];
    g.away_team = f[3];
    if (g.home_team.empty() || g.away_team.empty()) throw ParseError(n, "empty team name");
    if (g.home_team == g.away_team) throw ParseError(n, "self-game: '" + g.home_team + "'");
    g.home_score = parse_int_field(f[4], "home_score", n);
    g.away_score = parse_int_field(f[5], "away_score", n);
    if (g.home_score < 0 || g.away_score < 0) throw ParseError(n, "negative score");
    g.neutral = parse_flag(f[6], n);
    out.games.push_back(std::move(g));
  }
  return out;
}

GameSet parse_games_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open games file '" + path + "'");
  return parse_games(in);
}

ConferenceMap parse_conferences(std::istream& in) {
  csv::LineReader reader(in);
  reader.expect_header(kConferenceColumns);

  ConferenceMap out;
  std::string line;
  while (reader.next(line)) {
    const auto n = reader.line_no();
    const auto f = csv::split(line);
    if (f.size() != kConferenceColumns.size()) {
      throw ParseError(n, "expected 3 fields, found " + std::to_string(f.size()));
    }
    const int season = parse_int_field(f[0], "season", n);
    if (f[1].empty() || f[2].empty()) throw ParseError(n, "empty team or conference");
    try {
      out.add(season, f[1], f[2]);
    } catch (const Error& e) {
      throw ParseError(n, e.what());
    }
  }
  return out;
}

ConferenceMap parse_conferences_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open conferences file '" + path + "'");
  return parse_conferences(in);
}

IntraconferenceSplit filter_intraconference(const GameSet& games, const ConferenceMap& conferences,
                                            bool drop_neutral) {
  IntraconferenceSplit out;
  for (const auto& g : games.games) {
    if (drop_neutral && g.neutral) {
      ++out.dropped_neutral;
      continue;
    }
    const auto home = conferences.lookup(g.season, g.home_team);
    const auto away = conferences.lookup(g.season, g.away_team);
    if (!home || !away || *home != *away) {
      ++out.dropped;
      continue;
    }
    auto& bucket = out.by_conference[*home];
    if (bucket.label.empty()) bucket.label = games.label.empty() ? *home : games.label + " " + *home;
    bucket.games.push_back(g);
  }
  return out;
}

std::map<int, GameSet> split_by_season(const GameSet& games) {
  std::map<int, GameSet> out;
  for (const auto& g : games.games) {
    auto& bucket = out[g.season];
    if (bucket.label.empty()) {
      bucket.label = games.label.empty() ? std::to_string(g.season)
                                         : games.label + " " + std::to_string(g.season);
    }
    bucket.games.push_back(g);
  }
  return out;
}

GameSet drop_neutral_games(const GameSet& games) {
  GameSet out;
  out.label = games.label;
  std::copy_if(games.games.begin(), games.games.end(), std::back_inserter(out.games),
               [](const Game& g) { return !g.neutral; });
  return out;
}

Eigen::MatrixXd ScheduleMatrix::with_intercept() const {
  Eigen::MatrixXd w(n_games(), n_teams() + 1);
  w.col(0).setOnes();
  w.rightCols(n_teams()) = design;
  return w;
}

ScheduleMatrix ScheduleMatrix::from_design(Eigen::MatrixXd design, Eigen::VectorXd margins,
                                           std::vector<std::string> teams, std::string label) {
  if (design.rows() != margins.size()) throw Error("design rows and margins differ in length");
  if (design.cols() != static_cast<Eigen::Index>(teams.size())) {
    throw Error("design columns and team labels differ in count");
  }
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    int plus = 0;
    int minus = 0;
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
      const double z = design(i, j);
      if (z == 1.0) {
        ++plus;
      } else if (z == -1.0) {
        ++minus;
      } else if (z != 0.0) {
        throw Error("design entry outside {-1, 0, 1} in row " + std::to_string(i));
      }
    }
    if (plus != 1 || minus != 1) {
      throw Error("design row " + std::to_string(i) + " must hold exactly one +1 and one -1");
    }
  }
  ScheduleMatrix sm;
  sm.net_home = design.colwise().sum().transpose().cast<int>();
  sm.design = std::move(design);
  sm.margins = std::move(margins);
  sm.teams = std::move(teams);
  sm.label = std::move(label);
  return sm;
}

ScheduleMatrix ScheduleMatrix::with_margins(Eigen::VectorXd new_margins) const {
  if (new_margins.size() != n_games()) throw Error("margin vector length does not match schedule");
  ScheduleMatrix out = *this;
  out.margins = std::move(new_margins);
  return out;
}

ScheduleMatrix build_design(const GameSet& games) {
  if (games.empty()) throw Error("cannot build a schedule from an empty game set");

  std::vector<std::string> teams;
  for (const auto& g : games.games) {
    teams.push_back(g.home_team);
    teams.push_back(g.away_team);
  }
  std::sort(teams.begin(), teams.end());
  teams.erase(std::unique(teams.begin(), teams.end()), teams.end());

  std::unordered_map<std::string, Eigen::Index> column;
  for (std::size_t j = 0; j < teams.size(); ++j) column.emplace(teams[j], static_cast<Eigen::Index>(j));

  const auto n = static_cast<Eigen::Index>(games.size());
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(teams.size()));
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& g = games.games[static_cast<std::size_t>(i)];
    z(i, column.at(g.home_team)) = 1.0;
    z(i, column.at(g.away_team)) = -1.0;
    d(i) = g.margin();
  }
  return ScheduleMatrix::from_design(std::move(z), std::move(d), std::move(teams), games.label);
}

EstimabilityReport check_estimability(const ScheduleMatrix& schedule, double tol) {
  const Eigen::MatrixXd w = schedule.with_intercept();
  const auto pinv = linalg::pseudo_inverse(w);
  const double scale = w.size() > 0 ? w.cwiseAbs().maxCoeff() : 1.0;
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(w.cols());
  e1(0) = 1.0;
  return {linalg::is_estimable(pinv.row_projector, e1, tol * scale), pinv.rank};
}

}  // namespace hfa
