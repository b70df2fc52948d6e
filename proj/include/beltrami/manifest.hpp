#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace beltrami {

/// Plain-text run manifest.
///
/// Grammar (UTF-8, one entry per line):
///   line    := blank | comment | entry
///   comment := ws* '#' any*
///   entry   := ws* key ws* '=' ws* value ws*
///   key     := [A-Za-z0-9_.-]+
///   value   := any character except newline
/// Reals are written with 17 significant digits so they round-trip exactly,
/// lists are comma-separated, booleans are "true"/"false". Keys are unique and
/// kept in insertion order.
class Manifest {
 public:
  void comment(const std::string& text);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, std::size_t value) { set(key, static_cast<std::int64_t>(value)); }
  void set(const std::string& key, int value) { set(key, static_cast<std::int64_t>(value)); }
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::vector<double>& values);

  bool contains(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static Manifest parse(std::istream& in);
  static Manifest load(const std::filesystem::path& path);

  static std::string format_double(double v);
  static double parse_double(const std::string& text, const std::string& key);

 private:
  // Comment lines are stored with an empty key.
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace beltrami
