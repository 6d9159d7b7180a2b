#include "cfrag/util/kv_config.hpp"

#include <fstream>
#include <sstream>

#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag {

KvConfig KvConfig::parse(std::string_view content) {
  KvConfig cfg;
  std::string section;
  int line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section header");
      }
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(text::trim(line.substr(0, eq)));
    std::string_view value = text::trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string_view::npos) {
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
      }
      value = value.substr(1, close - 1);
    } else if (const auto hash = value.find('#'); hash != std::string_view::npos) {
      value = text::trim(value.substr(0, hash));
    }
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    cfg.set(section.empty() ? key : section + "." + key, std::string(value));
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void KvConfig::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

bool KvConfig::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> KvConfig::get(std::string_view key) const {
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  return std::nullopt;
}

}  // namespace cfrag
