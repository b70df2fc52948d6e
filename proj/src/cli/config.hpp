#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "beltrami/example_family.hpp"
#include "beltrami/field.hpp"
#include "beltrami/manifest.hpp"

namespace beltrami::cli {

enum class Command { Solve, Ladder, Check, Diagnose, Example };
enum class OracleKind { None, Example1, Example2, Constant, File };

std::string to_string(Command c);
std::string to_string(OracleKind k);

/// Validation failure; `key` names the offending setting.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Raised after CLI11 has printed help or a usage error; carries the exit code.
struct EarlyExit {
  int code;
};

struct RunConfig {
  Command command = Command::Solve;
  std::size_t n_side = 512;
  double half_width = 1.25;
  OracleKind oracle = OracleKind::None;
  cplx constant_mu;
  cplx constant_nu;
  std::string coeff_file;
  examples::ExampleParams params;
  std::vector<double> levels = {2, 4, 8, 16, 32};
  double tol = 1e-8;
  std::size_t max_iter = 5000;
  std::size_t outer_max = 60;
  double ladder_tol = 1e-2;
  std::filesystem::path out = "beltrami_out";
  cplx z0;
  std::string report;
  double compact_radius = 0.9;
  std::size_t pairs = 4000;
  std::string which = "f";
  std::string format = "bfld";

  /// Throws ConfigError naming the first invalid key.
  void validate() const;
  Manifest to_manifest() const;
};

/// Keys accepted in a --config file (key = value lines).
const std::vector<std::string>& config_keys();

/// Applies one key=value setting; throws ConfigError for unknown keys or
/// unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses "re" or "re,im".
cplx parse_complex(const std::string& text, const std::string& key);

/// Parses the command line (CLI11). A --config file is applied first and
/// explicit flags override it. Throws ConfigError on validation failures and
/// EarlyExit for --help or malformed command lines.
RunConfig parse_config(int argc, const char* const* argv);

}  // namespace beltrami::cli
