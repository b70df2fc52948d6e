#include "beltrami/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "beltrami/field_io.hpp"

namespace beltrami {

namespace {

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string Manifest::format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double Manifest::parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  if (t == "nan") return NAN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw FormatError("manifest key '" + key + "': '" + t + "' is not a number");
  }
  if (used != t.size()) throw FormatError("manifest key '" + key + "': '" + t + "' is not a number");
  return v;
}

void Manifest::comment(const std::string& text) { entries_.emplace_back(std::string{}, text); }

void Manifest::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw std::invalid_argument("invalid manifest key '" + key + "'");
  if (value.find('\n') != std::string::npos) {
    throw std::invalid_argument("manifest value for '" + key + "' contains a newline");
  }
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }
void Manifest::set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
void Manifest::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

void Manifest::set(const std::string& key, const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ',';
    joined += format_double(values[i]);
  }
  set(key, joined);
}

bool Manifest::contains(const std::string& key) const { return find(key).has_value(); }

std::optional<std::string> Manifest::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (!k.empty() && k == key) return v;
  }
  return std::nullopt;
}

std::string Manifest::get(const std::string& key) const {
  auto v = find(key);
  if (!v) throw FormatError("manifest is missing key '" + key + "'");
  return *v;
}

double Manifest::get_double(const std::string& key) const { return parse_double(get(key), key); }

std::int64_t Manifest::get_int(const std::string& key) const {
  const std::string t = trim(get(key));
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw FormatError("manifest key '" + key + "': '" + t + "' is not an integer");
  return v;
}

bool Manifest::get_bool(const std::string& key) const {
  const std::string t = trim(get(key));
  if (t == "true") return true;
  if (t == "false") return false;
  throw FormatError("manifest key '" + key + "': '" + t + "' is not a boolean");
}

std::vector<double> Manifest::get_list(const std::string& key) const {
  const std::string text = get(key);
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, key));
  return out;
}

void Manifest::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) {
    if (k.empty()) {
      out << "# " << v << '\n';
    } else {
      out << k << '=' << v << '\n';
    }
  }
}

void Manifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write(out);
  if (!out) throw FormatError("write failed for " + path.string());
}

Manifest Manifest::parse(std::istream& in) {
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      m.comment(trim(t.substr(1)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (!valid_key(key)) throw FormatError("manifest line " + std::to_string(lineno) + ": invalid key '" + key + "'");
    if (m.contains(key)) throw FormatError("manifest line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    m.entries_.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse(in);
}

}  // namespace beltrami
