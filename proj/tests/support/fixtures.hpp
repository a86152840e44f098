#pragma once

// Synthetic input files for end-to-end runs of the command-line tool.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hfa::testing {

struct LeagueFiles {
  std::filesystem::path games;
  std::filesystem::path conferences;
};

/// n_conferences conferences of `teams_per_conference` teams over seasons
/// first_season.. Intraconference play is two round robins with random hosts,
/// except in `balanced_season`, which is home-and-home. A few interconference
/// and neutral-site games are added each season.
LeagueFiles write_league_files(const std::filesystem::path& dir, std::uint64_t seed, int n_conferences,
                               int teams_per_conference, int first_season, int n_seasons,
                               int balanced_season = -1);

std::string read_text(const std::filesystem::path& path);
/// Non-comment lines, header included.
std::vector<std::string> data_lines(const std::filesystem::path& path);

}  // namespace hfa::testing
