#include "output.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "hfa/error.hpp"

namespace hfa::cli {

const char* tool_version() { return HFA_VERSION; }

InputDigest digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed for '" + path.string() + "'");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return {path.filename().string(), out};
}

json::Json to_json(const Metadata& meta) {
  json::Json inputs = json::Json::array();
  for (const auto& d : meta.inputs) inputs.push_back({{"file", d.name}, {"sha256", d.sha256}});
  json::Json out = {{"tool", "hfa"}, {"version", tool_version()}, {"command", meta.command}};
  out["seed"] = meta.seed ? json::Json(*meta.seed) : json::Json(nullptr);
  out["inputs"] = std::move(inputs);
  out["settings"] = meta.settings;
  out["tolerances"] = meta.tolerances;
  return out;
}

std::string csv_preamble(const Metadata& meta) {
  std::string out = "# tool: hfa " + std::string(tool_version()) + "\n";
  out += "# command: " + meta.command + "\n";
  out += "# seed: " + (meta.seed ? std::to_string(*meta.seed) : std::string("none")) + "\n";
  for (const auto& d : meta.inputs) out += "# input: " + d.name + " sha256=" + d.sha256 + "\n";
  out += "# settings: " + meta.settings.dump() + "\n";
  out += "# tolerances: " + meta.tolerances.dump() + "\n";
  return out;
}

std::string csv_number(double value) {
  return std::isfinite(value) ? json::format_double(value) : std::string("NA");
}

std::string csv_number(const std::optional<double>& value) { return value ? csv_number(*value) : "NA"; }

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace hfa::cli
