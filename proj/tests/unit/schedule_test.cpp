#include <sstream>

#include <gtest/gtest.h>

#include "hfa/error.hpp"
#include "hfa/schedule.hpp"
#include "oracles.hpp"

namespace hfa {
namespace {

constexpr const char* kHeader = "season,date,home_team,away_team,home_score,away_score,neutral\n";

GameSet games_from(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return parse_games(in);
}

ConferenceMap conferences_from(const std::string& body) {
  std::istringstream in("season,team,conference\n" + body);
  return parse_conferences(in);
}

TEST(ParseGames, MapsFields) {
  const auto gs = games_from("2017,,A,B,70,60,0\n");
  ASSERT_EQ(gs.size(), 1u);
  const auto& g = gs.games[0];
  EXPECT_EQ(g.season, 2017);
  EXPECT_EQ(g.home_team, "A");
  EXPECT_EQ(g.away_team, "B");
  EXPECT_EQ(g.home_score, 70);
  EXPECT_EQ(g.away_score, 60);
  EXPECT_FALSE(g.neutral);
  EXPECT_DOUBLE_EQ(g.margin(), 10.0);
}

TEST(ParseGames, EmptyBodyGivesNoGames) { EXPECT_TRUE(games_from("").empty()); }

TEST(ParseGames, PreservesRowOrderAndDates) {
  const auto gs = games_from("2018,2018-01-02,C,D,1,2,1\n2017,,A,B,3,3,false\n");
  ASSERT_EQ(gs.size(), 2u);
  EXPECT_EQ(gs.games[0].date, "2018-01-02");
  EXPECT_TRUE(gs.games[0].neutral);
  EXPECT_EQ(gs.games[1].season, 2017);
  EXPECT_DOUBLE_EQ(gs.games[1].margin(), 0.0);
}

TEST(ParseGames, RejectsSelfGame) {
  try {
    games_from("2017,,A,A,70,60,0\n");
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("self-game"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseGames, RejectsNonIntegerScore) {
  EXPECT_THROW(games_from("2017,,A,B,70.5,60,0\n"), ParseError);
  EXPECT_THROW(games_from("2017,,A,B,x,60,0\n"), ParseError);
}

TEST(ParseGames, MalformedRowNamesLine) {
  try {
    games_from("2017,,A,B,70,60,0\n# comment\n2017,,A,B,70\n");
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(ParseGames, RejectsNegativeScoreAndBadHeader) {
  EXPECT_THROW(games_from("2017,,A,B,-1,60,0\n"), ParseError);
  std::istringstream bad("season,home,away\n");
  EXPECT_THROW(parse_games(bad), ParseError);
}

TEST(ConferenceMap, RejectsConflictingMembership) {
  EXPECT_THROW(conferences_from("2017,A,X\n2017,A,Y\n"), Error);
  const auto cm = conferences_from("2017,A,X\n2017,A,X\n2018,A,Y\n");
  EXPECT_EQ(cm.lookup(2017, "A"), "X");
  EXPECT_EQ(cm.lookup(2018, "A"), "Y");
  EXPECT_FALSE(cm.lookup(2019, "A").has_value());
}

TEST(FilterIntraconference, KeepsOnlySameConferenceGames) {
  const auto cm = conferences_from("2017,A,Big12\n2017,B,Big12\n2017,C,SEC\n");
  const auto gs = games_from("2017,,B,A,70,60,0\n2017,,C,A,70,60,0\n");
  const auto split = filter_intraconference(gs, cm, true);
  ASSERT_EQ(split.by_conference.size(), 1u);
  ASSERT_EQ(split.by_conference.at("Big12").size(), 1u);
  EXPECT_EQ(split.by_conference.at("Big12").games[0].away_team, "A");
  EXPECT_EQ(split.dropped, 1u);
}

TEST(FilterIntraconference, AllNeutralDropped) {
  const auto cm = conferences_from("2017,A,X\n2017,B,X\n");
  const auto gs = games_from("2017,,A,B,1,0,1\n2017,,B,A,1,0,1\n");
  const auto split = filter_intraconference(gs, cm, true);
  EXPECT_TRUE(split.by_conference.empty());
  EXPECT_EQ(split.dropped_neutral, 2u);
  EXPECT_EQ(filter_intraconference(gs, cm, false).by_conference.at("X").size(), 2u);
}

TEST(FilterIntraconference, EmptyMapDropsEverything) {
  const auto gs = games_from("2017,,A,B,1,0,0\n2017,,C,D,1,0,0\n");
  const auto split = filter_intraconference(gs, ConferenceMap{}, true);
  EXPECT_TRUE(split.by_conference.empty());
  EXPECT_EQ(split.dropped, gs.size());
}

TEST(FilterIntraconference, UsesSeasonSpecificMembership) {
  const auto cm = conferences_from("2017,A,X\n2017,B,X\n2018,A,X\n2018,B,Y\n");
  const auto gs = games_from("2017,,A,B,1,0,0\n2018,,A,B,1,0,0\n");
  const auto split = filter_intraconference(gs, cm, true);
  EXPECT_EQ(split.by_conference.at("X").size(), 1u);
  EXPECT_EQ(split.dropped, 1u);
}

TEST(BuildDesign, EncodesHomeAndAway) {
  const auto sm = build_design(games_from("2017,,A,B,10,6,0\n2017,,A,C,10,4,0\n2017,,B,C,5,3,0\n"));
  ASSERT_EQ(sm.teams, (std::vector<std::string>{"A", "B", "C"}));
  Eigen::MatrixXd z(3, 3);
  z << 1, -1, 0, 1, 0, -1, 0, 1, -1;
  EXPECT_EQ(sm.design, z);
  EXPECT_EQ(sm.margins, Eigen::Vector3d(4, 6, 2));
}

TEST(BuildDesign, NetHome) {
  const auto pair = build_design(games_from("2017,,A,B,1,0,0\n2017,,B,A,1,0,0\n"));
  EXPECT_EQ(pair.net_home, Eigen::Vector2i(0, 0));
  const auto single = build_design(games_from("2017,,A,B,1,0,0\n"));
  EXPECT_EQ(single.net_home, Eigen::Vector2i(1, -1));
}

TEST(BuildDesign, SortsTeamsAndIsDeterministic) {
  const auto gs = games_from("2017,,zeta,alpha,1,0,0\n2017,,Mid,zeta,1,0,0\n");
  const auto a = build_design(gs);
  const auto b = build_design(gs);
  EXPECT_EQ(a.teams, (std::vector<std::string>{"Mid", "alpha", "zeta"}));
  EXPECT_EQ(a.design, b.design);
  EXPECT_EQ(a.teams, b.teams);
}

TEST(BuildDesign, EmptyThrows) { EXPECT_THROW(build_design(GameSet{}), Error); }

TEST(ScheduleMatrix, FromDesignValidatesRows) {
  Eigen::MatrixXd bad(1, 2);
  bad << 1, 1;
  EXPECT_THROW(ScheduleMatrix::from_design(bad, Eigen::VectorXd::Zero(1), {"A", "B"}), Error);
}

TEST(ScheduleMatrixProperty, RowSumsZeroAndNetHomeMatchesColumnSums) {
  Engine rng = make_engine(11, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto sm = testing::random_schedule(rng, 6, 15);
    EXPECT_EQ(sm.design.rowwise().sum().cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index c = 0; c < sm.n_teams(); ++c) {
      int sum = 0;
      for (Eigen::Index r = 0; r < sm.n_games(); ++r) sum += static_cast<int>(sm.design(r, c));
      EXPECT_EQ(sm.net_home(c), sum);
    }
  }
}

TEST(CheckEstimability, ThreeTeamCycle) {
  // B plays at A, A plays at C, C plays at B.
  const auto sm = build_design(games_from("2017,,A,B,1,0,0\n2017,,C,A,1,0,0\n2017,,B,C,1,0,0\n"));
  EXPECT_TRUE(check_estimability(sm).lambda_estimable);
}

TEST(CheckEstimability, SingleGameNotEstimable) {
  const auto sm = build_design(games_from("2017,,A,B,1,0,0\n"));
  const auto rep = check_estimability(sm);
  EXPECT_FALSE(rep.lambda_estimable);
  EXPECT_EQ(rep.rank_W, 1);
}

TEST(CheckEstimability, TwoDisjointHomeAndHomePairs) {
  const auto sm = build_design(
      games_from("2017,,A,B,1,0,0\n2017,,B,A,1,0,0\n2017,,C,D,1,0,0\n2017,,D,C,1,0,0\n"));
  const auto rep = check_estimability(sm);
  EXPECT_TRUE(rep.lambda_estimable);
  // Hand count: [1 | Z] has columns 1, A, B, C, D with A = -B and C = -D on the
  // rows that matter, so rank is 1 + 1 + 1 = 3.
  EXPECT_EQ(rep.rank_W, 3);
  EXPECT_EQ(rep.rank_W, testing::lu_rank(sm.with_intercept()));
}

TEST(CheckEstimabilityProperty, AgreesWithBruteForceRank) {
  Engine rng = make_engine(2024, 0);
  int estimable = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const int games = 1 + static_cast<int>(uniform_index(rng, 8));
    const auto sm = testing::random_schedule(rng, 4, games);
    const auto report = check_estimability(sm);
    ASSERT_EQ(report.lambda_estimable, testing::brute_force_estimable(sm.design)) << "instance " << rep;
    EXPECT_EQ(report.rank_W, testing::lu_rank(sm.with_intercept()));
    estimable += report.lambda_estimable ? 1 : 0;
  }
  EXPECT_GT(estimable, 100);
  EXPECT_LT(estimable, 1900);
}

TEST(SplitBySeason, GroupsInOrder) {
  const auto gs = games_from("2018,,A,B,1,0,0\n2017,,A,B,1,0,0\n2018,,B,A,1,0,0\n");
  const auto by = split_by_season(gs);
  ASSERT_EQ(by.size(), 2u);
  EXPECT_EQ(by.at(2018).size(), 2u);
  EXPECT_EQ(by.at(2018).games[1].home_team, "B");
  EXPECT_EQ(drop_neutral_games(games_from("2018,,A,B,1,0,1\n2018,,A,B,1,0,0\n")).size(), 1u);
}

}  // namespace
}  // namespace hfa
