#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "fracporo/assembly.hpp"
#include "fracporo/contact.hpp"
#include "fracporo/diagnostics.hpp"

namespace fracporo {

struct StepConfig {
  double dt = 1e-2;
  double fixed_point_tol = 1e-10;
  int max_fixed_point_iters = 50;
  double eps_friction = 1e-3;
  Mode mode = Mode::kQ0;

  void validate() const;
};

/// First-order DAE  M dXi/dt + N Xi = F  in Xi = (X, P, U) over free dofs.
/// The kinematic row is written as Kel (dU/dt - X) = 0 with Kel = E1 + E2,
/// which keeps the velocity-displacement coupling skew in N.
struct DaeSystem {
  SparseMatrix M;
  SparseMatrix N;
  int n_u = 0;
  int n_p = 0;

  static DaeSystem build(const SystemMatrices& reduced, const MaterialParams& params);

  int size() const { return 2 * n_u + n_p; }
  Vector pack(const State& s) const;
  State unpack(const Vector& xi, double t) const;
  /// X^T D X + P^T (L + W) P: the part of Xi^T N Xi left after the
  /// coupling blocks cancel.
  double decoupled_form(const Vector& xi, const SystemMatrices& reduced) const;
};

/// Sparse LU factorization of a square matrix that records failure instead
/// of throwing. The matrix is equilibrated by diag(|a_ii|^-1/2) on both
/// sides before factorization.
class LinearSolver {
 public:
  LinearSolver() = default;
  explicit LinearSolver(const SparseMatrix& a) { factorize(a); }

  bool factorize(const SparseMatrix& a);
  bool ok() const { return ok_; }
  Vector solve(const Vector& b) const;
  /// Solves A^T y = b; factorizes the transpose on first use.
  Vector solve_transpose(const Vector& b) const;

 private:
  using Factor = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;
  std::shared_ptr<Factor> lu_;
  mutable std::shared_ptr<Factor> lu_t_;
  Eigen::SparseMatrix<double> a_;
  Vector scale_;
  bool ok_ = false;
};

/// Hager's estimate of the 1-norm condition number from LU solves.
double condition_estimate_1norm(const SparseMatrix& a, const LinearSolver& lu);

struct PencilReport {
  bool pass = false;
  double solve_residual = 0.0;     // relative, random right-hand side
  double condition_estimate = 0.0;
  int positive_samples = 0;        // Xi^T (sM + N) Xi > 0
  int samples = 0;
  std::string message;
};

/// Non-degeneracy of s M + N. Works on the symmetrically equilibrated
/// matrix S (s M + N) S, S = diag(|a_ii|^-1/2); the residual, condition
/// estimate and quadratic-form samples all refer to that matrix.
PencilReport check_pencil(const SparseMatrix& M, const SparseMatrix& N, double s = 1.0,
                          int samples = 20, unsigned seed = 7);

/// Largest relative gap between Xi^T N Xi and DaeSystem::decoupled_form
/// over random samples.
double coupling_cancellation_error(const DaeSystem& dae, const SystemMatrices& reduced,
                                   int samples = 20, unsigned seed = 11);

struct StepReport {
  int step = 0;
  double t = 0.0;
  int iterations = 0;
  double update_norm = 0.0;   // final relative update in the M-norm
  double friction_power = 0.0;  // <J_eps'(U, X), X> at the accepted state
};

/// Bulk and fracture mass-balance residuals of one step with the leakage
/// term recovered from the bulk equation.
struct LeakageRecord {
  Vector dual;     // over free pressure dofs, zero off the fracture
  Vector nodal;    // fracture mass-matrix solve, ordered as DofMap::fracture_p_dofs
  double bulk_closure = 0.0;      // |r_b - Q_L| / scale
  double fracture_closure = 0.0;  // |r_f + Q_L| / scale
};

LeakageRecord recover_leakage(const State& before, const State& after,
                              const SystemMatrices& reduced, const LoadVectors& loads_after,
                              const DofMap& dofs, const MaterialParams& params);

/// Static elasticity solve for U0 with P0, X0 interpolated from the data.
State solve_initial_state(const MeshBundle& geometry, const DofMap& dofs,
                          const MaterialParams& params, const WidthProfile& width,
                          const SourceData& data);

struct RunResult {
  State final_state;
  std::vector<StepReport> steps;
  std::vector<EnergyCheck> energy;
  EnergyReport report;
};

class TimeIntegrator {
 public:
  using Observer = std::function<void(const State& before, const State& after,
                                      const StepReport& report, const EnergyCheck& energy)>;

  TimeIntegrator(MeshBundle geometry, DofMap dofs, MaterialParams params, WidthProfile width,
                 SourceData data, StepConfig cfg);

  State initial_state() const;
  /// Advances state by one step; throws SolverError on non-convergence.
  StepReport step(State& state);
  RunResult run(const State& initial, int steps, const Observer& observer = {});

  const MeshBundle& geometry() const { return geometry_; }
  const DofMap& dofs() const { return dofs_; }
  const MaterialParams& params() const { return params_; }
  const StepConfig& config() const { return cfg_; }
  const SystemMatrices& matrices() const { return reduced_; }
  const DaeSystem& dae() const { return dae_; }
  const ContactOperator& contact() const { return contact_; }
  /// Contact operator used in the equations; null in mode Q0.
  const ContactOperator* active_contact() const {
    return cfg_.mode == Mode::kQ ? &contact_ : nullptr;
  }
  LoadVectors loads(double t) const;
  /// Loads at the time level of the last completed step.
  const LoadVectors& last_loads() const { return last_loads_; }

 private:
  void refresh_width(double t);

  MeshBundle geometry_;
  DofMap dofs_;
  MaterialParams params_;
  WidthProfile width_;
  SourceData data_;
  StepConfig cfg_;
  SystemMatrices reduced_;
  DaeSystem dae_;
  ContactOperator contact_;
  LinearSolver pencil_;
  LoadVectors last_loads_;
  double factorized_dt_ = 0.0;
  int step_count_ = 0;
};

}  // namespace fracporo
