#include "fracporo_cli/cli.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracporo/config.hpp"
#include "fracporo/output.hpp"
#include "fracporo/solver.hpp"

namespace fracporo {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string output;
  int steps = -1;
  std::string mode;
  bool check_energy = false;
  int convergence = 0;
  bool dump_matrices = false;
};

std::string field_name(const char* stem, int step) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d.vtk", stem, step);
  return buf;
}

void dump_matrices(const fs::path& dir, const SystemMatrices& m) {
  const std::pair<const char*, const SparseMatrix*> named[] = {
      {"C_u", &m.C_u}, {"C_p", &m.C_p}, {"C_pc", &m.C_pc}, {"A_up", &m.A_up},
      {"B", &m.B},     {"L", &m.L},     {"W", &m.W},       {"M_upc", &m.M_upc},
      {"E1", &m.E1},   {"E2", &m.E2},   {"D", &m.D}};
  for (const auto& [name, a] : named) {
    std::ostringstream text;
    write_coordinate_text(*a, text);
    write_file_atomic(dir / (std::string(name) + ".txt"), text.str());
  }
}

int run_convergence(const RunConfig& cfg, int levels, const fs::path& out_dir, std::ostream& out,
                    std::ostream& err) {
  if (cfg.source_case != SourceCase::kManufactured) {
    err << "error: --convergence requires [sources] case = manufactured\n";
    return kExitConfig;
  }
  if (levels < 2) {
    err << "error: --convergence needs at least 2 levels\n";
    return kExitConfig;
  }
  ManufacturedStudy study;
  study.domain = cfg.geometry.domain;
  study.fracture = cfg.geometry.fracture;
  study.h0 = cfg.geometry.h / std::pow(2.0, cfg.geometry.refine);
  study.levels = levels;
  study.dt = cfg.time.dt;
  study.steps = cfg.steps;
  study.params = cfg.material;
  study.width_w0 = cfg.width.w0;
  study.width_tip_exponent = cfg.width.tip_exponent;
  const ConvergenceTable table = run_manufactured_study(study);
  write_file_atomic(out_dir / "convergence.csv", convergence_csv(table));
  for (std::size_t i = 0; i < table.h.size(); ++i) {
    const FieldErrors& e = table.errors[i];
    out << "h = " << table.h[i] << "  |p|_L2 " << e.p_l2 << "  |p|_H1 " << e.p_h1 << "  |u|_L2 "
        << e.u_l2 << "  |u|_H1 " << e.u_h1 << '\n';
  }
  const FieldErrors& o = table.orders.back();
  out << "observed orders (finest pair): p L2 " << o.p_l2 << ", p H1 " << o.p_h1 << ", u L2 "
      << o.u_l2 << ", u H1 " << o.u_h1 << '\n';
  return kExitOk;
}

int run_simulation(const RunConfig& cfg, const Options& opt, const fs::path& out_dir,
                   std::ostream& out, std::ostream& err) {
  Problem problem = build_problem(cfg);
  TimeIntegrator integrator(problem.geometry, problem.dofs, cfg.material, problem.width,
                            problem.sources, cfg.time);
  if (opt.dump_matrices) dump_matrices(out_dir / "matrices", integrator.matrices());

  const Mode mode = cfg.time.mode;
  const auto observe = [&](const State& s, int step, int iters, const EnergyReport& energy) {
    TimeSeriesRow row;
    row.step = step;
    row.t = s.t;
    row.energy = energy;
    row.fp_iters = iters;
    if (mode == Mode::kQ) {
      const ContactObservables obs =
          contact_observables(s, mode, integrator.contact(), cfg.time.eps_friction);
      row.max_penetration = obs.max_penetration;
      row.stick_fraction = obs.stick_fraction;
    } else {
      row.max_penetration = std::numeric_limits<double>::quiet_NaN();
      row.stick_fraction = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
  };
  const auto write_step_fields = [&](const State& s, int step) {
    write_fields(out_dir / field_name("fields", step), out_dir / field_name("fracture", step),
                 integrator.geometry(), integrator.dofs(), s, cfg.material);
  };

  std::vector<TimeSeriesRow> rows;
  std::vector<EnergyCheck> checks;
  const State initial = integrator.initial_state();
  EnergyReport initial_report;
  initial_report.stored = stored_energy(initial, integrator.matrices(), integrator.active_contact());
  rows.push_back(observe(initial, 0, 0, initial_report));
  if (cfg.output.fields_every > 0) write_step_fields(initial, 0);

  EnergyTracker tracker(initial_report.stored);
  State s = initial;
  int exit_code = kExitOk;
  int max_iters = 0;
  try {
    for (int i = 0; i < cfg.steps; ++i) {
      const StepReport rep = integrator.step(s);
      const StepBudget budget = step_budget(s, integrator.matrices(), integrator.last_loads(),
                                            integrator.active_contact(), cfg.time.eps_friction);
      const EnergyCheck check =
          tracker.advance(stored_energy(s, integrator.matrices(), integrator.active_contact()),
                          budget, cfg.time.dt, rep.step, s.t);
      checks.push_back(check);
      rows.push_back(observe(s, rep.step, rep.iterations, tracker.report()));
      max_iters = std::max(max_iters, rep.iterations);
      if (cfg.output.fields_every > 0 && rep.step % cfg.output.fields_every == 0) {
        write_step_fields(s, rep.step);
      }
    }
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    exit_code = kExitNonConvergence;
  }

  if (cfg.output.timeseries) write_file_atomic(out_dir / "timeseries.csv", timeseries_csv(rows));
  if (cfg.output.energy) write_file_atomic(out_dir / "energy.csv", energy_csv(checks));
  write_fields(out_dir / "fields_final.vtk", out_dir / "fracture_final.vtk", integrator.geometry(),
               integrator.dofs(), s, cfg.material);
  if (exit_code != kExitOk) return exit_code;

  int violations = 0;
  double worst = 0.0;
  for (const auto& c : checks) {
    if (!c.ok) ++violations;
    worst = std::min(worst, c.slack() / c.scale);
  }
  out << "completed " << checks.size() << " steps to t = " << s.t << " (mode "
      << to_string(mode) << ", " << integrator.dofs().num_u() << " displacement and "
      << integrator.dofs().num_p() << " pressure dofs, max fixed-point iterations " << max_iters
      << ")\n";
  out << "energy inequality: " << violations << " violations, worst relative slack " << worst
      << '\n';
  if (opt.check_energy && violations > 0) {
    err << "error: discrete energy inequality violated at " << violations << " steps\n";
    return kExitEnergy;
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractured poroelastic medium simulator with fracture flow and frictional contact"};
  app.name("fracporo");
  Options opt;
  app.add_option("--config", opt.config, "Configuration file")->required();
  app.add_option("--output", opt.output, "Output directory (overrides [output] directory)");
  app.add_option("--steps", opt.steps, "Number of time steps (overrides [time] steps)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--mode", opt.mode, "Model: Q0 (no contact) or Q (contact and friction)")
      ->check(CLI::IsMember({"Q0", "Q"}));
  app.add_flag("--check-energy", opt.check_energy,
               "Exit with status 4 if the discrete energy inequality fails at any step");
  app.add_option("--convergence", opt.convergence,
                 "Run an L-level manufactured-solution study instead of a time run");
  app.add_flag("--dump-matrices", opt.dump_matrices,
               "Write the assembled matrices in coordinate text format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    RunConfig cfg = load_config(opt.config);
    if (opt.steps >= 0) cfg.steps = opt.steps;
    if (!opt.mode.empty()) cfg.time.mode = parse_mode(opt.mode);
    if (!opt.output.empty()) cfg.output.directory = opt.output;
    cfg.validate();
    const fs::path out_dir = cfg.output.directory;
    fs::create_directories(out_dir);
    if (opt.convergence != 0) return run_convergence(cfg, opt.convergence, out_dir, out, err);
    return run_simulation(cfg, opt, out_dir, out, err);
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MeshError& e) {
    err << "mesh error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"fracporo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fracporo
