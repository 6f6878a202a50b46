#pragma once

#include <map>
#include <optional>
#include <string>

namespace silas {

/// Flat key = value configuration with profile inheritance and environment
/// overrides (SILAS_<KEY> beats file values; explicit set() beats both).
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_profile(const std::string& profile);

  /// Highest-precedence assignment (command-line flags).
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_seed() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  void apply_profile(const std::string& name);
  std::optional<std::string> env_override(const std::string& key) const;
  std::map<std::string, std::string> values_;     // profile + file
  std::map<std::string, std::string> overrides_;  // explicit set()
};

}  // namespace silas
