#pragma once

#include <functional>
#include <vector>

#include "fracporo/assembly.hpp"
#include "fracporo/contact.hpp"
#include "fracporo/state.hpp"

namespace fracporo {

/// Stored energy of a state. Quadratic terms carry the factor 1/2.
struct StoredEnergy {
  double kinetic = 0.0;        // 1/2 X^T C_u X
  double strain_G = 0.0;       // 1/2 U^T E1 U
  double strain_lambda = 0.0;  // 1/2 U^T E2 U
  double storage_bulk = 0.0;   // 1/2 P^T C_p P
  double storage_frac = 0.0;   // 1/2 P^T C_pc P
  double contact_R = 0.0;      // R(U)

  double total() const {
    return kinetic + strain_G + strain_lambda + storage_bulk + storage_frac + contact_R;
  }
};

/// contact may be null (mode Q0).
StoredEnergy stored_energy(const State& s, const SystemMatrices& reduced,
                           const ContactOperator* contact);

/// Rates evaluated at the new state of a backward-Euler step.
struct StepBudget {
  double diss_darcy = 0.0;     // P^T L P
  double diss_frac = 0.0;      // P^T W P
  double diss_visc = 0.0;      // X^T D X
  double diss_friction = 0.0;  // <J_eps'(U, X), X>
  double work = 0.0;           // X.F_u + P.(F_p + F_pc)

  double dissipation() const { return diss_darcy + diss_frac + diss_visc + diss_friction; }
};

StepBudget step_budget(const State& after, const SystemMatrices& reduced,
                       const LoadVectors& loads_after, const ContactOperator* contact, double eps);

/// E_{n+1} + dt Diss_{n+1} <= E_n + dt Work_{n+1} + rel_tol * scale.
struct EnergyCheck {
  int step = 0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;
  bool ok = true;

  double slack() const { return rhs - lhs; }
};

EnergyCheck check_energy_step(const StoredEnergy& before, const StoredEnergy& after,
                              const StepBudget& budget, double dt, double rel_tol = 1e-10);

/// Stored terms of the latest state plus time-accumulated dissipation and work
/// (sum of dt times the value at the new time level).
struct EnergyReport {
  StoredEnergy stored;
  double diss_darcy = 0.0;
  double diss_frac = 0.0;
  double diss_visc = 0.0;
  double diss_friction = 0.0;
  double work = 0.0;

  bool nonnegative() const;
};

class EnergyTracker {
 public:
  EnergyTracker() = default;
  explicit EnergyTracker(const StoredEnergy& initial) { report_.stored = initial; }

  EnergyCheck advance(const StoredEnergy& after, const StepBudget& budget, double dt, int step,
                      double t, double rel_tol = 1e-10);
  const EnergyReport& report() const { return report_; }

 private:
  EnergyReport report_;
};

/// Mass balances tested with the constant function on the free pressure dofs.
struct MassBalance {
  double bulk = 0.0;      // bulk equation with the leakage term
  double fracture = 0.0;  // fracture equation with the leakage term
  double summed = 0.0;    // leakage eliminated
  double scale = 0.0;
};

MassBalance mass_balance_residual(const State& before, const State& after,
                                  const SystemMatrices& reduced, const LoadVectors& loads_after,
                                  const Vector& leakage_dual, const MaterialParams& params);

/// Stored fluid: 1^T (C_p + C_pc) P + 1^T (alpha A_up + M_upc^T)^T U.
double fluid_content(const State& s, const SystemMatrices& reduced, const MaterialParams& params);

struct ContactObservables {
  double max_penetration = 0.0;
  double total_slip_rate = 0.0;  // int |[x]_T| ds
  double stick_fraction = 1.0;   // over quadrature points
  int points = 0;
};

/// Throws ValidationError in mode Q0, where the observables are undefined.
ContactObservables contact_observables(const State& s, Mode mode, const ContactOperator& contact,
                                       double eps);

// --- manufactured solutions ------------------------------------------------

struct ExactFields {
  std::function<double(const Point2&, double)> p;
  std::function<Vec2(const Point2&, double)> grad_p;
  std::function<Vec2(const Point2&, double)> u;
  std::function<Mat2(const Point2&, double)> grad_u;  // (i, j) = d u_i / d x_j
};

struct FieldErrors {
  double p_l2 = 0.0;
  double p_h1 = 0.0;  // seminorm
  double u_l2 = 0.0;
  double u_h1 = 0.0;  // seminorm
};

/// Errors of the P1 fields of s against the exact fields at time s.t.
FieldErrors field_errors(const MeshBundle& geometry, const DofMap& dofs, const State& s,
                         const ExactFields& exact);

struct ConvergenceTable {
  std::vector<double> h;
  std::vector<FieldErrors> errors;
  // log2-type observed orders log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
  std::vector<FieldErrors> orders;
};

/// Throws ValidationError for fewer than two levels or non-decreasing h.
ConvergenceTable make_convergence_table(const std::vector<double>& h,
                                        const std::vector<FieldErrors>& errors);

}  // namespace fracporo
