#include "cli/run.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <iostream>

#include "beltrami/conditions.hpp"
#include "beltrami/diagnostics.hpp"
#include "beltrami/example_family.hpp"
#include "beltrami/field_io.hpp"

namespace fs = std::filesystem;

namespace beltrami::cli {

OutputLock::OutputLock(const fs::path& dir) : path_(dir / ".lock") {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd_ < 0) {
    if (errno == EEXIST) throw IoError("output directory " + dir.string() + " is locked by another run (" + path_.string() + ")");
    throw IoError("cannot create " + path_.string() + ": " + std::strerror(errno));
  }
}

OutputLock::~OutputLock() {
  if (fd_ >= 0) {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
}

namespace {

const GridSpec& check_grid(const GridSpec& expected, const ComplexField& f, const std::string& what) {
  if (!(f.grid() == expected)) throw FormatError(what + ": grid does not match the coefficient manifest");
  return expected;
}

std::size_t nearest(double v, const GridSpec& grid) {
  const double k = std::round((v + grid.half_width()) / grid.spacing());
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(grid.n_side() - 1)));
}

void save_field(const fs::path& dir, const std::string& name, const ComplexField& field, const std::string& format) {
  if (format == "csv") {
    save_csv(dir / (name + ".csv"), field);
  } else {
    save_bfld(dir / (name + ".bfld"), field);
  }
}

std::string level_name(double level) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", level);
  return buf;
}

void record_solution(Manifest& m, const std::string& prefix, const MappingSolution& sol) {
  m.set(prefix + "status", to_string(sol.status));
  m.set(prefix + "iterations", sol.iterations);
  m.set(prefix + "outer_iterations", sol.outer_iterations);
  m.set(prefix + "residual_linf", sol.residual_linf);
  m.set(prefix + "q_max", sol.coefficients.q_max);
  m.set(prefix + "shift", std::vector<double>{sol.normalization.shift.real(), sol.normalization.shift.imag()});
  m.set(prefix + "f_at_one",
        std::vector<double>{sol.normalization.f_at_one.real(), sol.normalization.f_at_one.imag()});
  if (!sol.outer_diffs.empty()) m.set(prefix + "outer_diffs", sol.outer_diffs);
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  opts.outer_max = cfg.outer_max;
  return opts;
}

bool is_example(OracleKind k) { return k == OracleKind::Example1 || k == OracleKind::Example2; }

int run_solve(const RunConfig& cfg, std::ostream& log) {
  const GridSpec grid(cfg.n_side, cfg.half_width);
  CoefficientOracle oracle = make_oracle(cfg);
  if (std::isfinite(cfg.params.k)) oracle = truncate(oracle, truncation_function(cfg, oracle), cfg.params.k);
  OutputLock lock(cfg.out);
  BeltramiSolver solver(grid);
  log << "solving on " << cfg.n_side << "^2 nodes, L = " << cfg.half_width << "\n";
  const MappingSolution sol = solver.solve_quasilinear(oracle, solver_options(cfg));
  for (const auto& [name, field] : {std::pair<std::string, const ComplexField*>{"f", &sol.f},
                                    {"fz", &sol.fz},
                                    {"fzbar", &sol.fzbar},
                                    {"omega", &sol.omega},
                                    {"mu", &sol.coefficients.mu_field},
                                    {"nu", &sol.coefficients.nu_field}}) {
    save_bfld(cfg.out / (name + ".bfld"), *field);
    if (cfg.format == "csv") save_csv(cfg.out / (name + ".csv"), *field);
  }
  Manifest m = cfg.to_manifest();
  m.comment("solution");
  record_solution(m, "", sol);
  m.save(cfg.out / "manifest.txt");
  log << "status " << to_string(sol.status) << ", residual " << Manifest::format_double(sol.residual_linf)
      << ", outer iterations " << sol.outer_iterations << "\n";
  return sol.converged() ? kExitOk : kExitNotConverged;
}

int run_ladder_cmd(const RunConfig& cfg, std::ostream& log) {
  const GridSpec grid(cfg.n_side, cfg.half_width);
  const CoefficientOracle oracle = make_oracle(cfg);
  const RealPointFunction Q = truncation_function(cfg, oracle);
  OutputLock lock(cfg.out);
  LadderOptions opts;
  opts.solver = solver_options(cfg);
  opts.compact_radius = cfg.compact_radius;
  opts.convergence_tol = cfg.ladder_tol;
  const LadderRun run = run_ladder(oracle, Q, cfg.levels, grid, opts);
  Manifest m = cfg.to_manifest();
  m.comment("ladder");
  m.set("ladder.levels", run.levels);
  m.set("ladder.solved", run.solutions.size());
  m.set("ladder.sup_diffs", run.sup_diffs);
  m.set("ladder.converged", run.converged);
  m.set("ladder.aborted", run.aborted);
  if (run.aborted) m.set("ladder.abort_reason", run.abort_reason);
  for (std::size_t i = 0; i < run.solutions.size(); ++i) {
    const std::string name = "f_" + level_name(run.levels[i]);
    save_field(cfg.out, name, run.solutions[i].f, cfg.format);
    record_solution(m, "level." + level_name(run.levels[i]) + ".", run.solutions[i]);
  }
  if (run.solutions.size() >= 2) {
    const DerivativeL1 l1 = derivative_l1_convergence(run, cfg.compact_radius);
    m.set("ladder.l1_dz", l1.dz);
    m.set("ladder.l1_dzbar", l1.dzbar);
  }
  if (!run.solutions.empty()) {
    m.set("ladder.fd_residual_untruncated", fd_residual(run.solutions.back().f, oracle, 0.55, cfg.compact_radius));
  }
  m.save(cfg.out / "manifest.txt");
  for (std::size_t i = 0; i < run.sup_diffs.size(); ++i) {
    log << "sup-diff " << level_name(run.levels[i]) << " -> " << level_name(run.levels[i + 1]) << ": "
        << Manifest::format_double(run.sup_diffs[i]) << "\n";
  }
  if (run.aborted) log << "ladder aborted: " << run.abort_reason << "\n";
  return (run.converged && !run.aborted) ? kExitOk : kExitNotConverged;
}

int run_check(const RunConfig& cfg, std::ostream& log) {
  const CoefficientOracle oracle = make_oracle(cfg);
  const RealPointFunction Q = truncation_function(cfg, oracle);
  ConditionSettings settings;
  if (is_example(cfg.oracle)) settings.singular_radii = {0.5};
  const ConditionReport report = check_conditions(Q, cfg.z0, settings);
  Manifest m = cfg.to_manifest();
  const Manifest report_entries = report.to_manifest();
  for (const auto& entry : report_entries.entries()) {
    if (entry.first.empty()) {
      m.comment(entry.second);
    } else {
      m.set(entry.first, entry.second);
    }
  }
  const fs::path path = cfg.report.empty() ? cfg.out / "conditions.txt" : fs::path(cfg.report);
  OutputLock lock(path.has_parent_path() ? path.parent_path() : fs::path("."));
  m.save(path);
  log << "fmo: " << to_string(report.fmo_verdict) << "\ndivergence: " << to_string(report.divergence_verdict)
      << "\nring: " << to_string(report.ring_verdict) << "\nintegrability: " << to_string(report.integrability_verdict)
      << " (||Q||_1 = " << Manifest::format_double(report.q_l1_norm) << ")\nreport: " << path.string() << "\n";
  return kExitOk;
}

int run_diagnose(const RunConfig& cfg, std::ostream& log) {
  if (!(cfg.params.p >= 1.0 && cfg.params.p <= 2.0)) throw ConfigError("p", "diagnose needs 1 <= p <= 2");
  const fs::path dir = cfg.out;
  if (!fs::exists(dir / "manifest.txt")) throw IoError("no solution manifest in " + dir.string());
  OutputLock lock(dir);
  const Manifest stored = Manifest::load(dir / "manifest.txt");
  const ComplexField f = load_bfld(dir / "f.bfld");
  const ComplexField fz = load_bfld(dir / "fz.bfld");
  const ComplexField fzbar = load_bfld(dir / "fzbar.bfld");
  const FrozenCoefficients coeffs =
      FrozenCoefficients::from_fields(load_bfld(dir / "mu.bfld"), load_bfld(dir / "nu.bfld"));
  const double residual = residual_linf(fz, fzbar, coeffs);
  const double stored_residual = stored.get_double("residual_linf");
  const bool reproduced = residual == stored_residual;

  const double p = cfg.params.p;
  const DilatationReport dil = dilatation_report(f, p);
  const GridSpec& grid = f.grid();

  double q_l1 = 0.0;
  const std::string oracle = stored.get("oracle");
  if (oracle == "example1" || oracle == "example2") {
    examples::ExampleParams params;
    params.alpha = stored.get_double("alpha");
    params.p = stored.get_double("p");
    const RealPointFunction Q = [params](cplx y) {
      return examples::ex1_dilatation(y, params, examples::Dilatation::Q);
    };
    q_l1 = q_integrability(Q, 1.0).norm;
  } else {
    const double cell = grid.spacing() * grid.spacing();
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      if (in_unit_disk(grid.node(idx))) q_l1 += dilatation_K(coeffs.mu_field[idx], coeffs.nu_field[idx]) * cell;
    }
  }
  const HolderReport holder = log_holder_check(f, q_l1, cfg.compact_radius, cfg.pairs);

  Manifest m;
  m.comment("diagnose");
  m.set("source", dir.string());
  m.set("p", p);
  m.set("residual_linf", residual);
  m.set("residual_stored", stored_residual);
  m.set("residual_reproduced", reproduced);
  m.set("degenerate_fraction", dil.degenerate_fraction);
  double kmax = 1.0;
  std::size_t infinite = 0;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!in_unit_disk(grid.node(idx))) continue;
    if (std::isfinite(dil.K_mu_f[idx])) {
      kmax = std::max(kmax, dil.K_mu_f[idx]);
    } else {
      ++infinite;
    }
  }
  m.set("K_mu_f.max_finite", kmax);
  m.set("K_mu_f.infinite_nodes", infinite);
  const Manifest holder_entries = holder.to_manifest();
  for (const auto& entry : holder_entries.entries()) {
    if (!entry.first.empty()) m.set(entry.first, entry.second);
  }
  if (dil.degenerate_fraction < 0.005) {
    const InverseMap g = invert_mapping(f, grid);
    m.set("inverse.mapped_fraction", g.mapped_fraction());
    m.set("inverse.roundtrip_max", g.roundtrip_max);
    if (g.mapped_fraction() >= 0.99) {
      const InverseDilatationIntegral integral = inverse_dilatation_integral(g, p);
      m.set("inverse.K_I_p_integral", integral.integral);
      m.set("inverse.excluded_mass", integral.excluded_mass);
    }
    save_bfld(dir / "g.bfld", g.g);
  } else {
    m.set("inverse.skipped", std::string("degenerate fraction >= 0.5%"));
  }
  save_bfld(dir / "K_mu_f.bfld", to_complex(dil.K_mu_f));
  save_bfld(dir / "jacobian.bfld", to_complex(dil.jacobian));
  m.save(dir / "diagnose.txt");
  log << "residual " << Manifest::format_double(residual) << (reproduced ? " (reproduced)" : " (MISMATCH)")
      << "\ndegenerate fraction " << Manifest::format_double(dil.degenerate_fraction) << "\nfitted C "
      << Manifest::format_double(holder.fitted_C) << ", decade ratio " << Manifest::format_double(holder.decade_ratio)
      << "\n";
  return reproduced ? kExitOk : kExitConfig;
}

int run_example(const RunConfig& cfg, std::ostream& log) {
  using namespace examples;
  const GridSpec grid(cfg.n_side, cfg.half_width);
  const ExampleParams params = cfg.params;
  OutputLock lock(cfg.out);
  auto field_of = [&](auto&& fn) {
    ComplexField out(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) out[idx] = fn(grid.node(idx));
    return out;
  };
  std::vector<std::pair<std::string, ComplexField>> fields;
  if (cfg.which == "f") {
    fields.emplace_back("f", field_of([&](cplx z) { return ex1_f(z, params); }));
  } else if (cfg.which == "fk") {
    fields.emplace_back("fk", field_of([&](cplx z) { return ex1_fk(z, params); }));
  } else if (cfg.which == "gk") {
    fields.emplace_back("gk", field_of([&](cplx y) { return ex1_gk(y, params); }));
  } else if (cfg.which == "mu") {
    fields.emplace_back("mu", field_of([&](cplx z) { return ex1_mu(z, ex1_fk(z, params), params); }));
  } else {
    const std::pair<const char*, Dilatation> all[] = {
        {"K_mu", Dilatation::Kmu}, {"K_mu_k", Dilatation::Kmuk}, {"K_mu_gk", Dilatation::Kmugk}, {"Q", Dilatation::Q}};
    for (const auto& [name, which] : all) {
      fields.emplace_back(name, field_of([&](cplx z) { return cplx(ex1_dilatation(z, params, which), 0.0); }));
    }
  }
  Manifest m = cfg.to_manifest();
  m.comment("closed-form example fields");
  std::vector<std::string> names;
  for (const auto& [name, field] : fields) {
    save_field(cfg.out, name, field, cfg.format);
    names.push_back(name + "." + cfg.format);
  }
  std::string joined;
  for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
  m.set("files", joined);
  m.set("threshold_radius", params.threshold_radius());
  m.set("inner_image_radius", params.inner_image_radius());
  m.save(cfg.out / "manifest.txt");
  log << "wrote " << joined << " to " << cfg.out.string() << "\n";
  return kExitOk;
}

}  // namespace

CoefficientOracle load_coefficient_file(const fs::path& path) {
  const Manifest m = Manifest::load(path);
  const GridSpec grid(static_cast<std::size_t>(m.get_int("n_side")), m.get_double("half_width"));
  const std::vector<double> levels = m.get_list("w_levels");
  if (levels.empty()) throw FormatError(path.string() + ": w_levels is empty");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) throw FormatError(path.string() + ": w_levels must be increasing");
  }
  const fs::path base = path.parent_path();
  auto mu = std::make_shared<std::vector<ComplexField>>();
  auto nu = std::make_shared<std::vector<ComplexField>>();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string key = std::to_string(i);
    mu->push_back(load_bfld(base / m.get("mu." + key)));
    check_grid(grid, mu->back(), "mu." + key);
    if (const auto nu_file = m.find("nu." + key)) {
      nu->push_back(load_bfld(base / *nu_file));
      check_grid(grid, nu->back(), "nu." + key);
    } else {
      nu->emplace_back(grid);
    }
  }
  auto bound = std::make_shared<RealField>(grid);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    double q = 0.0;
    for (std::size_t l = 0; l < levels.size(); ++l) q = std::max(q, std::abs((*mu)[l][idx]) + std::abs((*nu)[l][idx]));
    if (in_unit_disk(grid.node(idx)) && !(q < 1.0)) {
      throw FormatError(path.string() + ": |mu| + |nu| >= 1 at a unit-disk node");
    }
    (*bound)[idx] = q;
  }
  auto lookup = [grid, levels](const std::shared_ptr<std::vector<ComplexField>>& fields) {
    return [grid, levels, fields](cplx z, cplx w) {
      const std::size_t idx = grid.index(nearest(z.imag(), grid), nearest(z.real(), grid));
      const double a = std::abs(w);
      if (a <= levels.front()) return (*fields).front()[idx];
      if (a >= levels.back()) return (*fields).back()[idx];
      const auto hi = static_cast<std::size_t>(std::upper_bound(levels.begin(), levels.end(), a) - levels.begin());
      const double t = (a - levels[hi - 1]) / (levels[hi] - levels[hi - 1]);
      return (1.0 - t) * (*fields)[hi - 1][idx] + t * (*fields)[hi][idx];
    };
  };
  CoefficientOracle oracle(lookup(mu), lookup(nu), [grid, bound](cplx z) {
    return (*bound)[grid.index(nearest(z.imag(), grid), nearest(z.real(), grid))];
  });
  if (levels.size() == 1) oracle.mark_linear();
  return oracle;
}

CoefficientOracle make_oracle(const RunConfig& cfg) {
  switch (cfg.oracle) {
    case OracleKind::Example1:
      return examples::example1_oracle(cfg.params);
    case OracleKind::Example2:
      return examples::example2_oracle(cfg.params);
    case OracleKind::Constant:
      return constant_oracle(cfg.constant_mu, cfg.constant_nu);
    case OracleKind::File:
      return load_coefficient_file(cfg.coeff_file);
    case OracleKind::None:
      break;
  }
  throw ConfigError("oracle", "no coefficient source selected");
}

RealPointFunction truncation_function(const RunConfig& cfg, const CoefficientOracle& oracle) {
  if (is_example(cfg.oracle)) return examples::example1_truncation_q(cfg.params);
  const RealPointFunction q = oracle.q();
  return [q](cplx z) { return in_unit_disk(z) ? (1.0 + q(z)) / (1.0 - q(z)) : 1.0; };
}

int run(const RunConfig& cfg, std::ostream& log) {
  switch (cfg.command) {
    case Command::Solve:
      return run_solve(cfg, log);
    case Command::Ladder:
      return run_ladder_cmd(cfg, log);
    case Command::Check:
      return run_check(cfg, log);
    case Command::Diagnose:
      return run_diagnose(cfg, log);
    case Command::Example:
      return run_example(cfg, log);
  }
  return kExitConfig;
}

int main_entry(int argc, const char* const* argv) {
  try {
    const RunConfig cfg = parse_config(argc, argv);
    return run(cfg, std::cout);
  } catch (const EarlyExit& e) {
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNotConverged;
  }
}

}  // namespace beltrami::cli
