#include "lm05/config.hpp"

#include <fstream>
#include <stdexcept>

namespace lm05 {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  ConfigFile cf;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key=value on line " +
                               std::to_string(lineno));
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error("config: empty key or value on line " +
                               std::to_string(lineno));
    cf.values_[key] = value;
  }
  return cf;
}

std::optional<std::string> ConfigFile::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ConfigFile::get_double(const std::string& key) const {
  const auto v = get_string(key);
  if (!v) return std::nullopt;
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return d;
  } catch (const std::exception&) {
    throw std::runtime_error("config: '" + key + "' is not a number: " + *v);
  }
}

std::optional<std::uint64_t> ConfigFile::get_u64(const std::string& key) const {
  const auto v = get_string(key);
  if (!v) return std::nullopt;
  try {
    std::size_t used = 0;
    const std::uint64_t u = std::stoull(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return u;
  } catch (const std::exception&) {
    throw std::runtime_error("config: '" + key + "' is not an integer: " + *v);
  }
}

std::optional<bool> ConfigFile::get_bool(const std::string& key) const {
  const auto v = get_string(key);
  if (!v) return std::nullopt;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw std::runtime_error("config: '" + key + "' is not a boolean: " + *v);
}

void ConfigFile::fill(const std::string& key, bool flag_given, double& target) const {
  if (flag_given) return;
  if (const auto v = get_double(key)) target = *v;
}

void ConfigFile::fill(const std::string& key, bool flag_given,
                      std::uint64_t& target) const {
  if (flag_given) return;
  if (const auto v = get_u64(key)) target = *v;
}

void ConfigFile::fill(const std::string& key, bool flag_given, unsigned& target) const {
  if (flag_given) return;
  if (const auto v = get_u64(key)) target = static_cast<unsigned>(*v);
}

void ConfigFile::fill(const std::string& key, bool flag_given, bool& target) const {
  if (flag_given) return;
  if (const auto v = get_bool(key)) target = *v;
}

void ConfigFile::fill(const std::string& key, bool flag_given,
                      std::string& target) const {
  if (flag_given) return;
  if (const auto v = get_string(key)) target = *v;
}

}  // namespace lm05
