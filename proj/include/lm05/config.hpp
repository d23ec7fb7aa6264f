#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace lm05 {

// Flat key=value configuration file with '#' comments. Values fill in
// whatever was not given on the command line; flags win over the file and
// the file wins over built-in defaults.
class ConfigFile {
 public:
  ConfigFile() = default;
  static ConfigFile load(const std::string& path);  // throws std::runtime_error

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::uint64_t> get_u64(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;

  // Overwrites `target` with the file value unless the flag was used.
  void fill(const std::string& key, bool flag_given, double& target) const;
  void fill(const std::string& key, bool flag_given, std::uint64_t& target) const;
  void fill(const std::string& key, bool flag_given, unsigned& target) const;
  void fill(const std::string& key, bool flag_given, bool& target) const;
  void fill(const std::string& key, bool flag_given, std::string& target) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace lm05
