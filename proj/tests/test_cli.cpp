#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "beltrami/field_io.hpp"
#include "cli/config.hpp"
#include "cli/run.hpp"

using namespace beltrami;
using namespace beltrami::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "beltrami");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

std::string config_error_key(std::vector<std::string> args) {
  try {
    parse(std::move(args));
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("beltrami_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int run_binary(const std::string& args) {
  const char* exe = std::getenv("BELTRAMI_CLI");
  REQUIRE(exe != nullptr);
  const int status = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("defaults and overrides") {
  const RunConfig d = parse({"solve", "--example1"});
  CHECK(d.command == Command::Solve);
  CHECK(d.oracle == OracleKind::Example1);
  CHECK(d.n_side == 512);
  CHECK(d.half_width == 1.25);
  CHECK(d.tol == 1e-8);
  CHECK(d.levels == std::vector<double>{2, 4, 8, 16, 32});
  CHECK(d.params.alpha == 1.0);
  CHECK(d.params.p == 1.0);
  CHECK(std::isinf(d.params.k));

  const RunConfig c = parse({"solve", "--constant-mu", "0.2,0.1", "--n-side", "64", "--k", "4"});
  CHECK(c.oracle == OracleKind::Constant);
  CHECK(c.constant_mu == cplx(0.2, 0.1));
  CHECK(c.n_side == 64);
  CHECK(c.params.k == 4.0);
  CHECK(parse_complex("0.5", "x") == cplx(0.5, 0.0));
  CHECK_THROWS_AS(parse_complex("a,b", "x"), ConfigError);
}

TEST_CASE("invalid configurations name the key") {
  CHECK(config_error_key({"solve", "--example1", "--alpha", "3", "--p", "1"}) == "alpha");
  CHECK(config_error_key({"solve", "--example1", "--k", "0.5"}) == "k");
  CHECK(config_error_key({"solve", "--example1", "--n-side", "100"}) == "n_side");
  CHECK(config_error_key({"solve", "--example1", "--half-width", "0.9"}) == "half_width");
  CHECK(config_error_key({"solve", "--constant-mu", "0.7", "--constant-nu", "0.4"}) != "");
  CHECK(config_error_key({"solve", "--example1", "--example2"}) != "");
  CHECK(config_error_key({"diagnose", "--pairs", "10"}) == "pairs");
  CHECK(config_error_key({"ladder", "--example1", "--levels", "4,2"}) == "levels");
}

TEST_CASE("config files") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "run.cfg");
    out << "# comment\nn_side = 128\ntol = 1e-6\nalpha = 0.5\n";
  }
  const RunConfig cfg = parse({"solve", "--example1", "--config", (dir / "run.cfg").string(), "--tol", "1e-7"});
  CHECK(cfg.n_side == 128);
  CHECK(cfg.tol == 1e-7);
  CHECK(cfg.params.alpha == 0.5);
  {
    std::ofstream out(dir / "bad.cfg");
    out << "grid_size = 128\n";
  }
  CHECK(config_error_key({"solve", "--example1", "--config", (dir / "bad.cfg").string()}) == "grid_size");
  RunConfig manual;
  CHECK_THROWS_AS(apply_setting(manual, "nope", "1"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("output lock") {
  const fs::path dir = scratch("lock");
  {
    OutputLock first(dir);
    CHECK(fs::exists(dir / ".lock"));
    CHECK_THROWS_AS(OutputLock{dir}, IoError);
  }
  CHECK_FALSE(fs::exists(dir / ".lock"));
  fs::remove_all(dir);
}

TEST_CASE("binary: solve, diagnose, determinism and exit codes") {
  const fs::path a = scratch("solve_a");
  const fs::path b = scratch("solve_b");
  const std::string common = "solve --constant-mu 0.5 --n-side 64 --tol 1e-10 --out ";
  CHECK(run_binary(common + a.string()) == kExitOk);
  CHECK(run_binary(common + b.string()) == kExitOk);
  CHECK(slurp(a / "f.bfld") == slurp(b / "f.bfld"));
  CHECK(fs::exists(a / "manifest.txt"));
  CHECK_FALSE(fs::exists(a / ".lock"));

  CHECK(run_binary("diagnose --out " + a.string() + " --p 2 --pairs 1000") == kExitOk);
  const Manifest diag = Manifest::load(a / "diagnose.txt");
  CHECK(diag.get_bool("residual_reproduced"));
  CHECK(fs::exists(a / "g.bfld"));

  // Tampered derivative field: the stored residual no longer reproduces.
  ComplexField fz = load_bfld(a / "fz.bfld");
  fz(32, 33) += 0.5;
  save_bfld(a / "fz.bfld", fz);
  CHECK(run_binary("diagnose --out " + a.string()) == kExitConfig);

  // Held lock.
  { std::ofstream(b / ".lock") << ""; }
  CHECK(run_binary(common + b.string()) == kExitIo);

  CHECK(run_binary("solve --example1 --alpha 3") == kExitConfig);
  CHECK(run_binary("diagnose --out " + scratch("missing").string()) == kExitIo);
  CHECK(run_binary("solve --constant-mu 0.5 --n-side 64 --max-iter 3 --out " + scratch("short").string()) ==
        kExitNotConverged);
  CHECK(run_binary("--help") == 0);
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(scratch("short"));
}

TEST_CASE("binary: check and example") {
  const fs::path dir = scratch("check");
  CHECK(run_binary("check --example1 --z0 0 --out " + dir.string()) == kExitOk);
  const Manifest rep = Manifest::load(dir / "conditions.txt");
  CHECK(rep.get("fmo.verdict") == "pass");
  CHECK(rep.get("integrability.verdict") == "fail");
  CHECK(run_binary("example --which gk --k 4 --n-side 64 --out " + dir.string() + "/ex") == kExitOk);
  const ComplexField gk = load_bfld(dir / "ex" / "gk.bfld");
  CHECK(gk.grid().n_side() == 64);
  fs::remove_all(dir);
}
