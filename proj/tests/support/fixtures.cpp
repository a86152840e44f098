#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hfa/random.hpp"

namespace hfa::testing {

LeagueFiles write_league_files(const std::filesystem::path& dir, std::uint64_t seed, int n_conferences,
                               int teams_per_conference, int first_season, int n_seasons, int balanced_season) {
  std::filesystem::create_directories(dir);
  Engine rng = make_engine(seed, 0);
  const int n_teams = n_conferences * teams_per_conference;
  std::vector<std::string> names;
  std::vector<double> eta;
  for (int i = 0; i < n_teams; ++i) {
    names.push_back("Team" + std::to_string(i));
    eta.push_back(5.0 * standard_normal(rng));
  }
  const auto conf_name = [](int c) { return "Conf" + std::string(1, static_cast<char>('A' + c)); };

  std::ostringstream games;
  std::ostringstream confs;
  games << "season,date,home_team,away_team,home_score,away_score,neutral\n";
  confs << "season,team,conference\n";
  const auto play = [&](int season, int h, int a, bool neutral) {
    const double m = (neutral ? 0.0 : 3.0) + eta[static_cast<std::size_t>(h)] - eta[static_cast<std::size_t>(a)] +
                     10.0 * standard_normal(rng);
    const long r = std::lround(m);
    games << season << ",," << names[static_cast<std::size_t>(h)] << ',' << names[static_cast<std::size_t>(a)] << ','
          << 20 + std::max(0L, r) << ',' << 20 + std::max(0L, -r) << ',' << (neutral ? 1 : 0) << '\n';
  };

  for (int s = first_season; s < first_season + n_seasons; ++s) {
    for (int c = 0; c < n_conferences; ++c) {
      const int base = c * teams_per_conference;
      for (int i = 0; i < teams_per_conference; ++i) confs << s << ',' << names[static_cast<std::size_t>(base + i)] << ',' << conf_name(c) << '\n';
      for (int i = 0; i < teams_per_conference; ++i) {
        for (int j = i + 1; j < teams_per_conference; ++j) {
          const int a = base + i;
          const int b = base + j;
          if (s == balanced_season) {
            play(s, a, b, false);
            play(s, b, a, false);
          } else {
            for (int k = 0; k < 2; ++k) {
              if (uniform01(rng) < 0.5) {
                play(s, a, b, false);
              } else {
                play(s, b, a, false);
              }
            }
          }
        }
      }
    }
    for (int k = 0; k < n_teams / 2; ++k) {
      const int h = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_teams)));
      const int a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_teams)));
      if (h / teams_per_conference != a / teams_per_conference) play(s, h, a, k % 3 == 0);
    }
  }
  LeagueFiles files{dir / "games.csv", dir / "conferences.csv"};
  std::ofstream(files.games, std::ios::binary) << games.str();
  std::ofstream(files.conferences, std::ios::binary) << confs.str();
  return files;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

}  // namespace hfa::testing
