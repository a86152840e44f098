#pragma once

// Output plumbing shared by the subcommands: reproducibility metadata, input
// digests and locale-independent CSV formatting.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hfa/json_io.hpp"

namespace hfa::cli {

struct InputDigest {
  std::string name;    // file name without directories
  std::string sha256;  // lowercase hex
};

/// Throws hfa::Error when the file cannot be read.
InputDigest digest_file(const std::filesystem::path& path);

struct Metadata {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<InputDigest> inputs;
  json::Json settings = json::Json::object();
  json::Json tolerances = json::Json::object();
};

json::Json to_json(const Metadata& meta);

/// The same metadata as '#' comment lines, for the top of a CSV file.
std::string csv_preamble(const Metadata& meta);

std::string csv_number(double value);
std::string csv_number(const std::optional<double>& value);

/// Writes atomically enough for batch use: content goes to `path` in one call.
void write_file(const std::filesystem::path& path, const std::string& content);

const char* tool_version();

}  // namespace hfa::cli
