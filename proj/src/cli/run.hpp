#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "beltrami/solver.hpp"
#include "cli/config.hpp"

namespace beltrami::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNotConverged = 2,
  kExitIo = 3,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exclusive `<dir>/.lock`, removed on destruction. Throws IoError when the
/// directory is already locked or cannot be created.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

/// Sampled coefficients on a (z, |w|) lattice.
///
/// Manifest keys: n_side, half_width, w_levels (increasing list of |w|),
/// mu.<i> and optionally nu.<i> naming BFLD files relative to the manifest.
/// Nearest node in z, linear interpolation in |w| (clamped at the ends); the
/// phase of w is ignored. The bound q is the max of |mu| + |nu| over levels.
CoefficientOracle load_coefficient_file(const std::filesystem::path& path);

CoefficientOracle make_oracle(const RunConfig& cfg);

/// Q used for truncation and hypothesis checks: K_mu for the examples,
/// Q_0 of the oracle bound otherwise.
RealPointFunction truncation_function(const RunConfig& cfg, const CoefficientOracle& oracle);

/// Executes a validated config; progress goes to `log`.
int run(const RunConfig& cfg, std::ostream& log);

/// Full entry point: parse, run, map exceptions to exit codes.
int main_entry(int argc, const char* const* argv);

}  // namespace beltrami::cli
