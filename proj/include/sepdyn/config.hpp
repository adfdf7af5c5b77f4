#pragma once

// ===========================================================================
// Flat key = value configuration text with dotted section prefixes, e.g.
//
//   # scattering setup
//   model.alpha      = 0.25
//   model.coupling   = g0
//   task.z_list      = -1, -10, -100
//
// '#' or ';' begins a whole-line comment; blank lines are ignored.  Parsing
// is total: a malformed or duplicated line raises ConfigError naming the
// source, line number, and the problem.  Typed getters raise ConfigError
// naming the key when a stored value does not parse as requested.
// ===========================================================================

#include <string>
#include <vector>

namespace sepdyn {

// Comma- and/or whitespace-separated doubles; `what` names the source in
// ConfigError diagnostics.  An empty list is an error.
std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& what);

class Config {
 public:
  Config() = default;

  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text,
                           const std::string& origin = "<config>");

  bool has(const std::string& key) const;

  // Getters return the fallback when the key is absent.
  std::string get_text(const std::string& key,
                       const std::string& fallback) const;
  double get_number(const std::string& key, double fallback) const;
  std::vector<double> get_numbers(const std::string& key,
                                  const std::vector<double>& fallback) const;

  // Raises ConfigError (with the line number) on any key outside `allowed`;
  // catches misspelled fields before they silently fall back to defaults.
  void require_known(const std::vector<std::string>& allowed) const;

  // Keys in file order.
  std::vector<std::string> keys() const;

 private:
  struct Entry {
    std::string key;
    std::string value;
    std::string origin;
    int line = 0;
  };

  const Entry* find(const std::string& key) const;

  std::vector<Entry> entries_;
};

}  // namespace sepdyn
