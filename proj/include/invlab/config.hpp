// Minimal `key = value` configuration files with '#' comments.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace invlab {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, std::string source = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  /// Throws ConfigError naming the key and source when absent.
  const std::string& require(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  double require_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t require_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;

  /// Comma-separated list value, entries trimmed, empty entries dropped.
  std::vector<std::string> get_list(const std::string& key) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& entries() const { return values_; }
  const std::string& source() const { return source_; }

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

}  // namespace invlab
