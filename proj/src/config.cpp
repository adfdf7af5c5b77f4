#include "sepdyn/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sepdyn/errors.hpp"

namespace sepdyn {

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) ||
                    c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string where(const std::string& origin, int line) {
  return origin + ":" + std::to_string(line);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t.empty())
    throw ConfigError("key '" + key + "' has an empty numeric value");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw ConfigError("key '" + key + "': cannot parse '" + t +
                      "' as a number");
  return v;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  std::string item;
  for (char c : text + ",") {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!trim(item).empty()) out.push_back(parse_double(item, what));
      item.clear();
    } else {
      item += c;
    }
  }
  if (out.empty())
    throw ConfigError("key '" + what + "' holds an empty list");
  return out;
}

Config Config::parse_text(const std::string& text,
                          const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where(origin, line_no) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError(where(origin, line_no) + ": invalid key '" + key +
                        "'");
    if (value.empty())
      throw ConfigError(where(origin, line_no) + ": key '" + key +
                        "' has no value");
    if (cfg.find(key) != nullptr)
      throw ConfigError(where(origin, line_no) + ": duplicate key '" + key +
                        "'");
    cfg.entries_.push_back({key, value, origin, line_no});
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_text(buf.str(), path);
}

const Config::Entry* Config::find(const std::string& key) const {
  for (const Entry& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

bool Config::has(const std::string& key) const {
  return find(key) != nullptr;
}

std::string Config::get_text(const std::string& key,
                             const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double Config::get_number(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  if (e == nullptr) return fallback;
  return parse_double(e->value, key);
}

std::vector<double> Config::get_numbers(
    const std::string& key, const std::vector<double>& fallback) const {
  const Entry* e = find(key);
  if (e == nullptr) return fallback;
  return parse_number_list(e->value, key);
}

void Config::require_known(const std::vector<std::string>& allowed) const {
  for (const Entry& e : entries_) {
    bool known = false;
    for (const std::string& a : allowed)
      if (e.key == a) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(where(e.origin, e.line) + ": unknown key '" + e.key +
                        "'");
  }
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.push_back(e.key);
  return out;
}

}  // namespace sepdyn
