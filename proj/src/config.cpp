#include "silas/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace silas {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Preset values for the shipped experiment families; explicit file keys
// and environment variables override these.
const std::map<std::string, std::map<std::string, std::string>>& presets() {
  static const std::map<std::string, std::map<std::string, std::string>> p = {
      {"cubic",
       {{"system", "cubic"},    {"alpha", "1.0"},  {"beta", "100"},
        {"kappa", "0.1"},       {"eps1", "0.1"},   {"eps2", "0.01"},
        {"eps3", "0.01"},       {"eps4", "1e-6"},  {"d_f", "3"},
        {"d_v", "4"},           {"K", "5"},        {"basis", "chebyshev"},
        {"lambda_identity", "0.4"},                {"samples", "100"},
        {"dt", "0.101"},        {"noise", "0.01"}, {"seed", "1"}}},
      {"sweep",
       {{"alpha", "0.1"},       {"beta", "1e6"},   {"kappa", "0.1"},
        {"eps1", "0.01"},       {"eps2", "0.01"},  {"eps3", "0.01"},
        {"eps4", "1e-6"},       {"d_v", "2"},      {"K", "1"},
        {"basis", "chebyshev"}, {"duration", "10"},{"noise", "0"},
        {"shrink", "0.1"},      {"seed", "1"},     {"test_fraction", "0.5"}}},
      {"rom",
       {{"alpha", "1.0"},       {"beta", "1e6"},   {"kappa", "10"},
        {"eps1", "0.01"},       {"eps2", "0.01"},  {"eps3", "0.01"},
        {"eps4", "1e-6"},       {"d_v", "2"},      {"d_f", "3"},
        {"K", "1"},             {"basis", "chebyshev"},
        {"shrink", "0.1"},      {"seed", "1"}}}};
  return p;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  RunConfig cfg;
  std::map<std::string, std::string> file_values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line without '=': " + line);
    file_values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  const auto prof = file_values.find("profile");
  if (prof != file_values.end()) cfg.apply_profile(prof->second);
  for (const auto& [k, v] : file_values) cfg.values_[k] = v;
  return cfg;
}

RunConfig RunConfig::from_profile(const std::string& profile) {
  RunConfig cfg;
  cfg.apply_profile(profile);
  return cfg;
}

void RunConfig::apply_profile(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end())
    throw std::runtime_error("unknown config profile: " + name);
  for (const auto& [k, v] : it->second) values_[k] = v;
  values_["profile"] = name;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  overrides_[key] = value;
}

std::optional<std::string> RunConfig::env_override(const std::string& key) const {
  std::string env_key = "SILAS_";
  for (char c : key) env_key += static_cast<char>(std::toupper(c));
  if (const char* v = std::getenv(env_key.c_str())) return std::string(v);
  return std::nullopt;
}

bool RunConfig::has(const std::string& key) const {
  return overrides_.count(key) > 0 || env_override(key).has_value() ||
         values_.count(key) > 0;
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  const auto ov = overrides_.find(key);
  if (ov != overrides_.end()) return ov->second;
  if (auto env = env_override(key)) return *env;
  const auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  return fallback;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const std::string v = get(key);
  return v.empty() ? fallback : std::stod(v);
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  const std::string v = get(key);
  return v.empty() ? fallback : std::stoi(v);
}

std::uint64_t RunConfig::get_seed() const {
  const std::string v = get("seed", "1");
  return static_cast<std::uint64_t>(std::stoull(v));
}

}  // namespace silas
