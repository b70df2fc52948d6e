#include "cli/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "beltrami/field_io.hpp"

namespace beltrami::cli {

namespace {

double number(const std::string& text, const std::string& key) {
  try {
    return Manifest::parse_double(text, key);
  } catch (const FormatError&) {
    throw ConfigError(key, "'" + text + "' is not a number");
  }
}

std::size_t count(const std::string& text, const std::string& key) {
  const double v = number(text, key);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw ConfigError(key, "'" + text + "' is not a count");
  return static_cast<std::size_t>(v);
}

std::vector<double> number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item, key));
  return out;
}

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct Command_ {
  Command command;
  const char* name;
  const char* help;
};

constexpr Command_ kCommands[] = {
    {Command::Solve, "solve", "Solve one (possibly truncated) equation"},
    {Command::Ladder, "ladder", "Run a truncation ladder"},
    {Command::Check, "check", "Check the hypotheses on Q at a point z0"},
    {Command::Diagnose, "diagnose", "Analyse a saved solution directory"},
    {Command::Example, "example", "Write closed-form example fields"},
};

}  // namespace

std::string to_string(Command c) {
  for (const auto& entry : kCommands) {
    if (entry.command == c) return entry.name;
  }
  return "solve";
}

std::string to_string(OracleKind k) {
  switch (k) {
    case OracleKind::None:
      return "none";
    case OracleKind::Example1:
      return "example1";
    case OracleKind::Example2:
      return "example2";
    case OracleKind::Constant:
      return "constant";
    case OracleKind::File:
      return "file";
  }
  return "none";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "command", "n_side",  "half_width", "oracle",     "constant_mu",    "constant_nu", "coeff_file",
      "alpha",   "p",       "k",          "levels",     "tol",            "max_iter",    "outer_max",
      "ladder_tol", "out",  "z0",         "report",     "compact_radius", "pairs",       "which",
      "format"};
  return keys;
}

cplx parse_complex(const std::string& text, const std::string& key) {
  const auto parts = number_list(text, key);
  if (parts.size() == 1) return {parts[0], 0.0};
  if (parts.size() == 2) return {parts[0], parts[1]};
  throw ConfigError(key, "expected 're' or 're,im', got '" + text + "'");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "command") {
    if (value != to_string(cfg.command)) {
      throw ConfigError(key, "config file is for '" + value + "' but the subcommand is '" + to_string(cfg.command) + "'");
    }
  } else if (key == "n_side") {
    cfg.n_side = count(value, key);
  } else if (key == "half_width") {
    cfg.half_width = number(value, key);
  } else if (key == "oracle") {
    if (value == "example1") {
      cfg.oracle = OracleKind::Example1;
    } else if (value == "example2") {
      cfg.oracle = OracleKind::Example2;
    } else if (value == "constant") {
      cfg.oracle = OracleKind::Constant;
    } else if (value == "file") {
      cfg.oracle = OracleKind::File;
    } else if (value == "none") {
      cfg.oracle = OracleKind::None;
    } else {
      throw ConfigError(key, "unknown oracle '" + value + "' (example1, example2, constant, file)");
    }
  } else if (key == "constant_mu") {
    cfg.constant_mu = parse_complex(value, key);
    cfg.oracle = OracleKind::Constant;
  } else if (key == "constant_nu") {
    cfg.constant_nu = parse_complex(value, key);
    cfg.oracle = OracleKind::Constant;
  } else if (key == "coeff_file") {
    cfg.coeff_file = value;
    cfg.oracle = OracleKind::File;
  } else if (key == "alpha") {
    cfg.params.alpha = number(value, key);
  } else if (key == "p") {
    cfg.params.p = number(value, key);
  } else if (key == "k") {
    cfg.params.k = number(value, key);
  } else if (key == "levels") {
    cfg.levels = number_list(value, key);
  } else if (key == "tol") {
    cfg.tol = number(value, key);
  } else if (key == "max_iter") {
    cfg.max_iter = count(value, key);
  } else if (key == "outer_max") {
    cfg.outer_max = count(value, key);
  } else if (key == "ladder_tol") {
    cfg.ladder_tol = number(value, key);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "z0") {
    cfg.z0 = parse_complex(value, key);
  } else if (key == "report") {
    cfg.report = value;
  } else if (key == "compact_radius") {
    cfg.compact_radius = number(value, key);
  } else if (key == "pairs") {
    cfg.pairs = count(value, key);
  } else if (key == "which") {
    cfg.which = value;
  } else if (key == "format") {
    cfg.format = value;
  } else {
    throw ConfigError(key, "unknown key");
  }
}

void RunConfig::validate() const {
  if (!power_of_two(n_side) || n_side < 16) throw ConfigError("n_side", "must be a power of two >= 16");
  if (!(half_width > 1.0) || !std::isfinite(half_width)) throw ConfigError("half_width", "must be finite and > 1");
  if (!(params.p >= 1.0) || !std::isfinite(params.p)) throw ConfigError("p", "must be finite and >= 1");
  const bool example = oracle == OracleKind::Example1 || oracle == OracleKind::Example2 || command == Command::Example;
  if (example && !(params.alpha > 0.0 && params.alpha < 2.0 / params.p)) {
    throw ConfigError("alpha", "must satisfy 0 < alpha < 2/p (alpha=" + Manifest::format_double(params.alpha) +
                                   ", p=" + Manifest::format_double(params.p) + ")");
  }
  if (example && !(params.k > 1.0 / params.alpha)) {
    throw ConfigError("k", "must satisfy k > 1/alpha (k=" + Manifest::format_double(params.k) +
                               ", alpha=" + Manifest::format_double(params.alpha) + ")");
  }
  if (!example && !(params.k > 1.0)) throw ConfigError("k", "must be > 1");
  if (!(tol > 0.0)) throw ConfigError("tol", "must be positive");
  if (max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
  if (outer_max < 1) throw ConfigError("outer_max", "must be >= 1");
  if (!(ladder_tol > 0.0)) throw ConfigError("ladder_tol", "must be positive");
  if (levels.empty()) throw ConfigError("levels", "must not be empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 1.0) || (i > 0 && !(levels[i] > levels[i - 1]))) {
      throw ConfigError("levels", "must be increasing and >= 1");
    }
  }
  if (!(compact_radius > 0.0 && compact_radius < 1.0)) throw ConfigError("compact_radius", "must lie in (0, 1)");
  if (pairs < 1000) throw ConfigError("pairs", "must be >= 1000");
  static const std::vector<std::string> whiches = {"f", "fk", "gk", "mu", "dilatations"};
  if (std::find(whiches.begin(), whiches.end(), which) == whiches.end()) {
    throw ConfigError("which", "must be one of f, fk, gk, mu, dilatations");
  }
  if (format != "bfld" && format != "csv") throw ConfigError("format", "must be bfld or csv");
  if (oracle == OracleKind::Constant && !(std::abs(constant_mu) + std::abs(constant_nu) < 1.0)) {
    throw ConfigError("constant_mu", "|mu| + |nu| must be < 1");
  }
  if (oracle == OracleKind::File && coeff_file.empty()) throw ConfigError("coeff_file", "missing path");
  const bool needs_oracle = command == Command::Solve || command == Command::Ladder || command == Command::Check;
  if (needs_oracle && oracle == OracleKind::None) {
    throw ConfigError("oracle", "choose one of --example1, --example2, --constant-mu/--constant-nu, --coeff-file");
  }
  if (command == Command::Check && !in_unit_disk(z0)) throw ConfigError("z0", "must lie inside the unit disk");
  if (out.empty()) throw ConfigError("out", "must not be empty");
}

Manifest RunConfig::to_manifest() const {
  Manifest m;
  m.set("command", to_string(command));
  m.set("n_side", n_side);
  m.set("half_width", half_width);
  m.set("oracle", to_string(oracle));
  if (oracle == OracleKind::Constant) {
    m.set("constant_mu", Manifest::format_double(constant_mu.real()) + "," + Manifest::format_double(constant_mu.imag()));
    m.set("constant_nu", Manifest::format_double(constant_nu.real()) + "," + Manifest::format_double(constant_nu.imag()));
  }
  if (oracle == OracleKind::File) m.set("coeff_file", coeff_file);
  m.set("alpha", params.alpha);
  m.set("p", params.p);
  m.set("k", params.k);
  m.set("levels", levels);
  m.set("tol", tol);
  m.set("max_iter", max_iter);
  m.set("outer_max", outer_max);
  m.set("ladder_tol", ladder_tol);
  m.set("out", out.string());
  m.set("z0", Manifest::format_double(z0.real()) + "," + Manifest::format_double(z0.imag()));
  if (!report.empty()) m.set("report", report);
  m.set("compact_radius", compact_radius);
  m.set("pairs", pairs);
  m.set("which", which);
  m.set("format", format);
  return m;
}

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Degenerate Beltrami equations: solver, hypothesis checks and diagnostics", "beltrami"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  struct Bound {
    CLI::Option* option;
    std::string key;
  };
  std::map<std::string, std::string> raw;
  std::map<CLI::App*, std::vector<Bound>> bound;
  std::map<CLI::App*, Command> which_command;
  std::map<CLI::App*, CLI::Option*> config_opt;
  std::map<CLI::App*, std::array<CLI::Option*, 2>> example_flags;
  std::string config_path;

  for (const auto& entry : kCommands) {
    CLI::App* sub = app.add_subcommand(entry.name, entry.help);
    which_command[sub] = entry.command;
    auto& list = bound[sub];
    auto add = [&](const std::string& flag, const std::string& key, const std::string& help) {
      list.push_back({sub->add_option(flag, raw[key], help), key});
    };
    config_opt[sub] = sub->add_option("--config", config_path, "key = value settings file (flags override it)")
                          ->check(CLI::ExistingFile);
    example_flags[sub] = {sub->add_flag("--example1", "Example 1 coefficient (nu = 0)"),
                          sub->add_flag("--example2", "Example 2 two-characteristic split")};
    add("--constant-mu", "constant_mu", "Constant mu on the disk ('re' or 're,im')");
    add("--constant-nu", "constant_nu", "Constant nu on the disk ('re' or 're,im')");
    add("--coeff-file", "coeff_file", "Sampled coefficient manifest");
    add("--alpha", "alpha", "Example exponent alpha, 0 < alpha < 2/p (default 1)");
    add("--p", "p", "Integrability exponent p >= 1; also the K_{I,p} order in diagnose (default 1)");
    add("--k", "k", "Truncation level, k > 1/alpha (default inf)");
    add("--n-side", "n_side", "Grid nodes per axis, power of two (default 512)");
    add("--half-width", "half_width", "Grid half width L > 1 (default 1.25)");
    add("--tol", "tol", "Solver tolerance (default 1e-8)");
    add("--max-iter", "max_iter", "Inner iteration cap (default 5000)");
    add("--outer-max", "outer_max", "Outer (freezing) iteration cap (default 60)");
    add("--levels", "levels", "Ladder levels, comma separated (default 2,4,8,16,32)");
    add("--ladder-tol", "ladder_tol", "Ladder convergence threshold on the last sup-difference (default 1e-2)");
    add("--out", "out", "Output directory (default beltrami_out)");
    add("--z0", "z0", "Point for check ('re' or 're,im', default 0)");
    add("--report", "report", "Report path for check (default <out>/conditions.txt)");
    add("--compact-radius", "compact_radius", "Compact |z| <= r for diagnose (default 0.9)");
    add("--pairs", "pairs", "Hoelder pairs for diagnose, >= 1000 (default 4000)");
    add("--which", "which", "example field: f, fk, gk, mu, dilatations (default f)");
    add("--format", "format", "Field format: bfld or csv (default bfld)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    throw EarlyExit(app.exit(e));
  }

  CLI::App* sub = app.get_subcommands().front();
  RunConfig cfg;
  cfg.command = which_command.at(sub);

  if (config_opt.at(sub)->count() > 0) {
    Manifest file;
    try {
      file = Manifest::load(config_path);
    } catch (const FormatError& e) {
      throw ConfigError("config", e.what());
    }
    for (const auto& [key, value] : file.entries()) {
      if (key.empty()) continue;
      const auto& keys = config_keys();
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key, "unknown key in config file");
      apply_setting(cfg, key, value);
    }
  }

  const auto& flags = example_flags.at(sub);
  std::size_t oracle_flags = flags[0]->count() > 0 ? 1 : 0;
  oracle_flags += flags[1]->count() > 0 ? 1 : 0;
  bool constant_flag = false;
  bool file_flag = false;
  for (const auto& b : bound.at(sub)) {
    if (b.option->count() == 0) continue;
    if (b.key == "constant_mu" || b.key == "constant_nu") constant_flag = true;
    if (b.key == "coeff_file") file_flag = true;
  }
  oracle_flags += (constant_flag ? 1 : 0) + (file_flag ? 1 : 0);
  if (oracle_flags > 1) throw ConfigError("oracle", "more than one coefficient source given");
  if (oracle_flags == 1) {
    cfg.oracle = OracleKind::None;
    cfg.constant_mu = cfg.constant_nu = 0.0;
  }
  if (flags[0]->count() > 0) cfg.oracle = OracleKind::Example1;
  if (flags[1]->count() > 0) cfg.oracle = OracleKind::Example2;
  for (const auto& b : bound.at(sub)) {
    if (b.option->count() > 0) apply_setting(cfg, b.key, raw.at(b.key));
  }
  cfg.validate();
  return cfg;
}

}  // namespace beltrami::cli
