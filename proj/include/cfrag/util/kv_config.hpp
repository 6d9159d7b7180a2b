#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace cfrag {

// Flat TOML-style configuration: `key = value` lines, `[section]` headers
// (keys become `section.key`), `#` comments, optional double quotes.
class KvConfig {
 public:
  static KvConfig parse(std::string_view content);
  static KvConfig load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

}  // namespace cfrag
