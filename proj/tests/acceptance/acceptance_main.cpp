// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracporo/constitutive.hpp"
#include "fracporo/contact.hpp"
#include "fracporo_cli/cli.hpp"
#include "oracles.hpp"
#include "runs.hpp"

namespace fp = fracporo;
namespace ft = fracporo::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Outcome element_matrix_oracle() {
  const auto start = Clock::now();
  const fp::MaterialParams params = ft::oracle_params();
  // Constant width keeps every integrand polynomial, so a degree-6 rule is exact.
  const fp::WidthProfile width = fp::WidthProfile::uniform(0.05);
  double worst = 0.0;
  std::string worst_name;
  int max_triangles = 0;
  for (const auto& mesh : ft::oracle_meshes()) {
    max_triangles = std::max(max_triangles, mesh.mesh.num_triangles());
    const fp::SystemMatrices m = fp::assemble_system(mesh, params, width, 0.0);
    const ft::OracleMatrices o = ft::oracle_assemble(mesh, params, width, 0.0);
    for (const auto& g : ft::compare_with_oracle(m, o)) {
      if (g.gap >= worst) {
        worst = g.gap;
        worst_name = g.name;
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = worst <= 1e-12 && max_triangles <= 50 && elapsed < 5.0;
  out.detail = "11 matrices on 3 meshes (<= " + std::to_string(max_triangles) +
               " triangles), worst relative gap " + fmt("%.2e", worst) + " (" + worst_name +
               "), " + fmt("%.2f", elapsed) + " s";
  return out;
}

Outcome pencil_check() {
  const auto start = Clock::now();
  const fp::RunConfig cfg = ft::load_shipped_config("contact.conf");
  fp::Problem problem = fp::build_problem(cfg);
  const fp::TimeIntegrator integrator(problem.geometry, problem.dofs, cfg.material, problem.width,
                                      problem.sources, cfg.time);
  const fp::DaeSystem& dae = integrator.dae();
  const fp::PencilReport rep = fp::check_pencil(dae.M, dae.N, 1.0, 20);
  const double cancel = fp::coupling_cancellation_error(dae, integrator.matrices(), 20);
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = rep.pass && rep.positive_samples == 20 && rep.samples == 20 && cancel <= 1e-12 &&
             elapsed < 5.0;
  out.detail = "factorization " + std::string(rep.pass ? "ok" : "failed") + ", solve residual " +
               fmt("%.1e", rep.solve_residual) + ", cond1 ~ " +
               fmt("%.1e", rep.condition_estimate) + ", positive quadratic forms " +
               std::to_string(rep.positive_samples) + "/" + std::to_string(rep.samples) +
               ", coupling cancellation gap " + fmt("%.1e", cancel) + ", " +
               fmt("%.2f", elapsed) + " s";
  return out;
}

Outcome zero_data_uniqueness() {
  fp::RunConfig cfg = ft::load_shipped_config("zero_data.conf");
  cfg.steps = 50;
  const ft::Trajectory tr = ft::run_trajectory(cfg);
  double worst = 0.0;
  for (const auto& s : tr.states) worst = std::max(worst, ft::max_abs(s));
  Outcome out;
  out.pass = worst <= 1e-10 && tr.steps.size() == 50;
  out.detail = std::to_string(tr.steps.size()) + " steps, max |U|,|X|,|P| = " + fmt("%.1e", worst);
  return out;
}

Outcome energy_inequality() {
  const auto start = Clock::now();
  const auto tmp = std::filesystem::temp_directory_path() / "fracporo_acceptance_energy";
  Outcome out;
  out.pass = true;
  for (const char* name : {"injection", "gravity", "traveling_load"}) {
    std::ostringstream sout, serr;
    const int code = fp::cli_main({"--config", ft::config_path(std::string(name) + ".conf"),
                                   "--output", (tmp / name).string(), "--steps", "100",
                                   "--check-energy"},
                                  sout, serr);
    if (code != 0) out.pass = false;
    out.detail += std::string(name) + " exit " + std::to_string(code) + ", ";
  }
  const double elapsed = seconds_since(start);
  out.pass = out.pass && elapsed < 60.0;
  out.detail += "100 steps each, " + fmt("%.2f", elapsed) + " s";
  std::filesystem::remove_all(tmp);
  return out;
}

Outcome formulation_equivalence() {
  const fp::RunConfig cfg = ft::load_shipped_config("injection.conf");
  const ft::Trajectory tr = ft::run_trajectory(cfg);
  const fp::TimeIntegrator& integ = *tr.integrator;
  double worst = 0.0;
  for (std::size_t n = 0; n + 1 < tr.states.size(); ++n) {
    const fp::State& after = tr.states[n + 1];
    const fp::LeakageRecord rec =
        fp::recover_leakage(tr.states[n], after, integ.matrices(), integ.loads(after.t),
                            integ.dofs(), integ.params());
    worst = std::max({worst, rec.bulk_closure, rec.fracture_closure});
  }
  Outcome out;
  out.pass = worst <= 1e-10 && tr.steps.size() == static_cast<std::size_t>(cfg.steps);
  out.detail = std::to_string(tr.steps.size()) + " injection steps, worst closure " +
               fmt("%.1e", worst);
  return out;
}

Outcome manufactured_convergence() {
  const auto start = Clock::now();
  const fp::RunConfig cfg = ft::load_shipped_config("manufactured.conf");
  fp::ManufacturedStudy study;
  study.domain = cfg.geometry.domain;
  study.fracture = cfg.geometry.fracture;
  study.h0 = cfg.geometry.h;
  study.levels = 3;
  study.dt = cfg.time.dt;
  study.steps = cfg.steps;
  study.params = cfg.material;
  study.width_w0 = cfg.width.w0;
  study.width_tip_exponent = cfg.width.tip_exponent;
  const fp::ConvergenceTable table = fp::run_manufactured_study(study);
  const fp::FieldErrors& o = table.orders.back();
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = o.p_l2 >= 1.5 && o.p_h1 >= 0.9 && o.u_h1 >= 0.9 && elapsed < 120.0;
  out.detail = "orders between h=" + fmt("%g", table.h[1]) + " and h=" + fmt("%g", table.h[2]) +
               ": p L2 " + fmt("%.3f", o.p_l2) + ", p H1 " + fmt("%.3f", o.p_h1) + ", u L2 " +
               fmt("%.3f", o.u_l2) + ", u H1 " + fmt("%.3f", o.u_h1) + ", " +
               fmt("%.2f", elapsed) + " s";
  return out;
}

Outcome psi_axioms() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> decade(-4.0, 4.0);
  int violations = 0;
  int samples = 0;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto draw = [&] {
      const double r = eps * std::pow(10.0, decade(rng));
      const double a = angle(rng);
      return fp::Vec2(r * std::cos(a), r * std::sin(a));
    };
    for (int i = 0; i < 10000; ++i, ++samples) {
      const fp::Vec2 v = i == 0 ? fp::Vec2::Zero() : draw();
      const fp::Vec2 w = draw();
      const double psi = fp::psi_eps(v, eps);
      const double norm = v.norm();
      // (i) 0 <= psi <= |v|
      if (psi < 0.0 || psi > norm) ++violations;
      // (ii) |psi'(w) v| <= D1 |v|, D1 = 1
      if (std::abs(fp::psi_eps_grad(w, eps).dot(v)) > norm) ++violations;
      // (iii) |psi - |v|| <= D2 eps, D2 = 1
      if (std::abs(psi - norm) > eps) ++violations;
      // convexity at the midpoint
      const double mid = fp::psi_eps(0.5 * (v + w), eps);
      if (mid > 0.5 * (psi + fp::psi_eps(w, eps)) * (1.0 + 1e-15)) ++violations;
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = std::to_string(samples) + " vectors over eps in {1e-1, 1e-2, 1e-3}, " +
               std::to_string(violations) + " violations";
  return out;
}

struct ContactRun {
  double max_penetration = 0.0;
  double total_slip_rate = 0.0;
  double stick_fraction = 0.0;
  double worst_friction_power = 0.0;  // min over steps of <J', X> / scale
  fp::State final_state;
  std::shared_ptr<ft::Trajectory> trajectory;
};

ContactRun run_contact(const std::function<void(fp::RunConfig&)>& tweak,
                       const char* config = "contact.conf") {
  fp::RunConfig cfg = ft::load_shipped_config(config);
  tweak(cfg);
  auto tr = std::make_shared<ft::Trajectory>(ft::run_trajectory(cfg));
  ContactRun run;
  run.trajectory = tr;
  run.final_state = tr->states.back();
  const fp::ContactObservables obs = fp::contact_observables(
      run.final_state, cfg.time.mode, tr->integrator->contact(), cfg.time.eps_friction);
  run.max_penetration = obs.max_penetration;
  run.total_slip_rate = obs.total_slip_rate;
  run.stick_fraction = obs.stick_fraction;
  for (std::size_t i = 0; i < tr->steps.size(); ++i) {
    run.worst_friction_power =
        std::min(run.worst_friction_power, tr->steps[i].friction_power / tr->energy[i].scale);
  }
  return run;
}

Outcome contact_monotonicity() {
  std::vector<double> pen;
  std::string detail = "max penetration";
  for (double c_n : {1e6, 1e8, 1e10}) {
    const ContactRun run = run_contact([&](fp::RunConfig& c) { c.material.c_n = c_n; });
    pen.push_back(run.max_penetration);
    detail += " " + fmt("%.3e", run.max_penetration);
  }
  const ContactRun stick = run_contact([](fp::RunConfig&) {}, "contact_stick.conf");
  Outcome out;
  out.pass = pen[0] > pen[1] && pen[1] > pen[2] && stick.stick_fraction == 1.0 &&
             stick.total_slip_rate <= 1e-10;
  out.detail = detail + " for c_n = 1e6, 1e8, 1e10; sub-threshold load: stick fraction " +
               fmt("%.3f", stick.stick_fraction) + ", total slip rate " +
               fmt("%.1e", stick.total_slip_rate);
  return out;
}

// The three regularization runs are shared by the friction-dissipation and
// regularization-limit criteria.
const std::vector<ContactRun>& epsilon_runs() {
  static const std::vector<ContactRun> runs = [] {
    std::vector<ContactRun> r;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      r.push_back(run_contact([&](fp::RunConfig& c) { c.time.eps_friction = eps; }));
    }
    return r;
  }();
  return runs;
}

Outcome friction_dissipation() {
  double worst = 0.0;
  int steps = 0;
  const auto& runs = epsilon_runs();
  for (const auto& run : runs) {
    worst = std::min(worst, run.worst_friction_power);
    steps += static_cast<int>(run.trajectory->steps.size());
  }
  Outcome out;
  out.pass = worst >= -1e-12;
  out.detail = std::to_string(runs.size()) + " mode-Q runs, " + std::to_string(steps) +
               " steps, min <J_eps', X> / scale = " + fmt("%.1e", worst);
  return out;
}

Outcome regularization_limit() {
  const auto& runs = epsilon_runs();
  const fp::DaeSystem& dae = runs[0].trajectory->integrator->dae();
  const double d1 = ft::state_distance(dae, runs[0].final_state, runs[1].final_state);
  const double d2 = ft::state_distance(dae, runs[1].final_state, runs[2].final_state);
  Outcome out;
  out.pass = d1 > d2;
  out.detail = "|S(1e-2) - S(1e-3)| = " + fmt("%.3e", d1) + ", |S(1e-3) - S(1e-4)| = " +
               fmt("%.3e", d2) + " (energy norm)";
  return out;
}

Outcome coulomb_recovery() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> m(1.0, 3.0);
  std::uniform_real_distribution<double> logc(-3.0, 12.0);
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    fp::MaterialParams p;
    p.m_n = m(rng);
    p.m_T = p.m_n;
    p.c_n = std::pow(10.0, logc(rng));
    p.c_T = std::pow(10.0, logc(rng));
    const fp::CoulombEquivalent law = fp::coulomb_equivalent(p);
    if (law.alpha_c != 0.0) ++failures;
  }
  Outcome out;
  out.pass = failures == 0;
  out.detail = "100 draws with m_T = m_n, " + std::to_string(failures) + " with alpha_c != 0";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"element matrices match degree-6 oracle", element_matrix_oracle},
      {"pencil non-degenerate, coupling cancels", pencil_check},
      {"zero data gives zero solution", zero_data_uniqueness},
      {"discrete energy inequality (Q0 configs)", energy_inequality},
      {"leakage recovery closes both mass balances", formulation_equivalence},
      {"manufactured solution convergence", manufactured_convergence},
      {"smooth norm regularization axioms", psi_axioms},
      {"contact monotonicity and stick", contact_monotonicity},
      {"friction never injects energy", friction_dissipation},
      {"regularization limit is Cauchy-like", regularization_limit},
      {"Coulomb law recovered for m_T = m_n", coulomb_recovery},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << (i + 1) << "] " << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
