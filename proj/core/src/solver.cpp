#include "fracporo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace fracporo {

namespace {

void append_block(std::vector<Triplet>& out, const SparseMatrix& a, int row0, int col0,
                  double scale) {
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      out.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                       scale * it.value());
    }
  }
}

Vector random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

double norm1(const SparseMatrix& a) {
  Vector col = Vector::Zero(a.cols());
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) col[it.col()] += std::abs(it.value());
  }
  return col.size() > 0 ? col.maxCoeff() : 0.0;
}

Vector interpolate_pressure(const Mesh2D& mesh, const DofMap& dofs,
                            const std::function<double(const Point2&)>& f) {
  Vector full = Vector::Zero(mesh.num_pressure_nodes);
  if (f) {
    for (int n = 0; n < mesh.num_nodes(); ++n) full[mesh.pressure_node[n]] = f(mesh.nodes[n]);
  }
  return dofs.restrict_p(full);
}

Vector interpolate_velocity(const Mesh2D& mesh, const DofMap& dofs,
                            const std::function<Vec2(const Point2&)>& f) {
  Vector full = Vector::Zero(2 * mesh.num_nodes());
  if (f) {
    for (int n = 0; n < mesh.num_nodes(); ++n) full.segment<2>(2 * n) = f(mesh.nodes[n]);
  }
  return dofs.restrict_u(full);
}

State initial_state_from(const MeshBundle& geometry, const DofMap& dofs,
                         const MaterialParams& params, const SystemMatrices& reduced,
                         const LoadVectors& loads0, const SourceData& data) {
  State s;
  s.t = 0.0;
  s.P = interpolate_pressure(geometry.mesh, dofs, data.initial_pressure);
  s.X = interpolate_velocity(geometry.mesh, dofs, data.initial_velocity);
  const SparseMatrix kel = reduced.E1 + reduced.E2;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kel);
  if (ldlt.info() != Eigen::Success) {
    throw SolverError(SolverError::Kind::kSingular,
                      "elasticity block is singular (insufficient displacement constraints)");
  }
  const Vector rhs = loads0.F_u + pressure_coupling(reduced, params) * s.P;
  s.U = ldlt.solve(rhs);
  if (!s.U.allFinite()) {
    throw SolverError(SolverError::Kind::kSingular, "initial elasticity solve produced non-finite values");
  }
  return s;
}

}  // namespace

void StepConfig::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("dt must be > 0");
  if (!(fixed_point_tol > 0.0)) throw ValidationError("fixed_point_tol must be > 0");
  if (max_fixed_point_iters < 1) throw ValidationError("max_fixed_point_iters must be >= 1");
  if (!(eps_friction > 0.0)) throw ValidationError("eps_friction must be > 0");
}

DaeSystem DaeSystem::build(const SystemMatrices& m, const MaterialParams& params) {
  DaeSystem dae;
  dae.n_u = static_cast<int>(m.C_u.rows());
  dae.n_p = static_cast<int>(m.C_p.rows());
  const int ox = 0;
  const int op = dae.n_u;
  const int ou = dae.n_u + dae.n_p;
  const SparseMatrix kel = m.E1 + m.E2;
  const SparseMatrix bc = pressure_coupling(m, params);
  const SparseMatrix bct = bc.transpose();

  std::vector<Triplet> mt;
  append_block(mt, m.C_u, ox, ox, 1.0);
  append_block(mt, m.C_p, op, op, 1.0);
  append_block(mt, m.C_pc, op, op, 1.0);
  append_block(mt, kel, ou, ou, 1.0);

  std::vector<Triplet> nt;
  append_block(nt, m.D, ox, ox, 1.0);
  append_block(nt, bc, ox, op, -1.0);
  append_block(nt, kel, ox, ou, 1.0);
  append_block(nt, bct, op, ox, 1.0);
  append_block(nt, m.L, op, op, 1.0);
  append_block(nt, m.W, op, op, 1.0);
  append_block(nt, kel, ou, ox, -1.0);

  const int n = dae.size();
  dae.M.resize(n, n);
  dae.M.setFromTriplets(mt.begin(), mt.end());
  dae.M.makeCompressed();
  dae.N.resize(n, n);
  dae.N.setFromTriplets(nt.begin(), nt.end());
  dae.N.makeCompressed();
  return dae;
}

Vector DaeSystem::pack(const State& s) const {
  Vector xi(size());
  xi << s.X, s.P, s.U;
  return xi;
}

State DaeSystem::unpack(const Vector& xi, double t) const {
  State s;
  s.t = t;
  s.X = xi.segment(0, n_u);
  s.P = xi.segment(n_u, n_p);
  s.U = xi.segment(n_u + n_p, n_u);
  return s;
}

double DaeSystem::decoupled_form(const Vector& xi, const SystemMatrices& m) const {
  const Vector x = xi.segment(0, n_u);
  const Vector p = xi.segment(n_u, n_p);
  return x.dot(m.D * x) + p.dot(m.L * p) + p.dot(m.W * p);
}

bool LinearSolver::factorize(const SparseMatrix& a) {
  a_ = a;
  a_.makeCompressed();
  const int n = static_cast<int>(a_.rows());
  scale_ = Vector::Ones(n);
  for (int c = 0; c < a_.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, c); it; ++it) {
      if (it.row() == it.col() && it.value() != 0.0) scale_[c] = 1.0 / std::sqrt(std::abs(it.value()));
    }
  }
  const Eigen::SparseMatrix<double> scaled = scale_.asDiagonal() * a_ * scale_.asDiagonal();
  lu_ = std::make_shared<Factor>();
  lu_t_.reset();
  lu_->analyzePattern(scaled);
  lu_->factorize(scaled);
  ok_ = lu_->info() == Eigen::Success;
  return ok_;
}

Vector LinearSolver::solve(const Vector& b) const {
  if (!ok_) throw SolverError(SolverError::Kind::kSingular, "solve with a failed factorization");
  const auto apply = [&](const Vector& rhs) -> Vector {
    const Vector y = lu_->solve(scale_.cwiseProduct(rhs));
    return scale_.cwiseProduct(y);
  };
  Vector x = apply(b);
  // One step of iterative refinement against the unscaled matrix.
  const Vector r = b - a_ * x;
  x += apply(r);
  return x;
}

Vector LinearSolver::solve_transpose(const Vector& b) const {
  if (!ok_) throw SolverError(SolverError::Kind::kSingular, "solve with a failed factorization");
  if (!lu_t_) {
    lu_t_ = std::make_shared<Factor>();
    const Eigen::SparseMatrix<double> at = a_.transpose();
    lu_t_->analyzePattern(at);
    lu_t_->factorize(at);
    if (lu_t_->info() != Eigen::Success) {
      throw SolverError(SolverError::Kind::kSingular, "transpose factorization failed");
    }
  }
  return lu_t_->solve(b);
}

double condition_estimate_1norm(const SparseMatrix& a, const LinearSolver& lu) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 0.0;
  Vector x = Vector::Constant(n, 1.0 / n);
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Vector y = lu.solve(x);
    est = y.lpNorm<1>();
    const Vector xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Vector z = lu.solve_transpose(xi);
    int j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x)) break;
    x.setZero();
    x[j] = 1.0;
  }
  return est * norm1(a);
}

PencilReport check_pencil(const SparseMatrix& M, const SparseMatrix& N, double s, int samples,
                          unsigned seed) {
  PencilReport rep;
  rep.samples = samples;
  if (M.rows() != M.cols() || N.rows() != N.cols() || M.rows() != N.rows()) {
    rep.message = "pencil blocks have mismatched shapes";
    return rep;
  }
  SparseMatrix a = s * M + N;
  a.makeCompressed();
  const int n = static_cast<int>(a.rows());
  // Symmetric diagonal equilibration: the blocks carry very different
  // physical scales, and invertibility does not depend on the scaling.
  Vector scale = Vector::Ones(n);
  for (int r = 0; r < n; ++r) {
    double diag = 0.0, row_max = 0.0;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      row_max = std::max(row_max, std::abs(it.value()));
      if (it.col() == r) diag = std::abs(it.value());
    }
    const double d = diag > 0.0 ? diag : row_max;
    if (d > 0.0) scale[r] = 1.0 / std::sqrt(d);
  }
  a = scale.asDiagonal() * a * scale.asDiagonal();
  a.makeCompressed();
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const Vector xi = random_vector(n, rng);
    if (xi.dot(a * xi) > 0.0) ++rep.positive_samples;
  }
  LinearSolver lu(a);
  if (!lu.ok()) {
    rep.message = "factorization of s M + N failed";
    return rep;
  }
  const Vector b = random_vector(n, rng);
  const Vector x = lu.solve(b);
  rep.solve_residual = (a * x - b).norm() / b.norm();
  if (!std::isfinite(rep.solve_residual)) {
    rep.message = "solve of s M + N produced non-finite values";
    return rep;
  }
  rep.condition_estimate = condition_estimate_1norm(a, lu);
  rep.pass = rep.solve_residual <= 1e-8;
  std::ostringstream msg;
  msg << (rep.pass ? "pencil non-degenerate" : "pencil solve residual too large")
      << " (residual " << rep.solve_residual << ", cond1 ~ " << rep.condition_estimate << ")";
  rep.message = msg.str();
  return rep;
}

double coupling_cancellation_error(const DaeSystem& dae, const SystemMatrices& m, int samples,
                                   unsigned seed) {
  std::mt19937_64 rng(seed);
  const SparseMatrix kel = m.E1 + m.E2;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vector xi = random_vector(dae.size(), rng);
    const State s = dae.unpack(xi, 0.0);
    const double full = xi.dot(dae.N * xi);
    const double decoupled = dae.decoupled_form(xi, m);
    // Size of the terms that are supposed to cancel.
    const double coupling = std::abs(s.X.dot(m.A_up * s.P)) + std::abs(s.P.dot(m.M_upc * s.X)) +
                            std::abs(s.X.dot(kel * s.U));
    const double scale = std::abs(decoupled) + 2.0 * coupling;
    worst = std::max(worst, std::abs(full - decoupled) / scale);
  }
  return worst;
}

LeakageRecord recover_leakage(const State& before, const State& after, const SystemMatrices& m,
                              const LoadVectors& loads, const DofMap& dofs,
                              const MaterialParams& params) {
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw ValidationError("leakage recovery needs after.t > before.t");
  const Vector dp = (after.P - before.P) / dt;
  const Vector terms_b[] = {m.C_p * dp, params.alpha * (m.A_up.transpose() * after.X),
                            m.L * after.P, -loads.F_p};
  const Vector terms_f[] = {m.C_pc * dp, m.M_upc * after.X, m.W * after.P, -loads.F_pc};
  Vector r_b = Vector::Zero(dofs.num_p());
  Vector r_f = Vector::Zero(dofs.num_p());
  double scale = 0.0;
  for (const auto& v : terms_b) {
    r_b += v;
    scale = std::max(scale, v.norm());
  }
  for (const auto& v : terms_f) {
    r_f += v;
    scale = std::max(scale, v.norm());
  }
  if (scale == 0.0) scale = 1.0;

  LeakageRecord rec;
  rec.dual = Vector::Zero(dofs.num_p());
  const auto& frac = dofs.fracture_p_dofs();
  for (int i : frac) rec.dual[i] = r_b[i];
  rec.bulk_closure = (r_b - rec.dual).norm() / scale;
  rec.fracture_closure = (r_f + rec.dual).norm() / scale;

  // Nodal values from the fracture trace mass matrix C_pc / c_fc.
  std::vector<int> local(dofs.num_p(), -1);
  for (std::size_t k = 0; k < frac.size(); ++k) local[frac[k]] = static_cast<int>(k);
  const int nf = static_cast<int>(frac.size());
  SparseMatrix mass = restrict_matrix(m.C_pc, local, nf, local, nf) / params.c_fc;
  Vector rhs(nf);
  for (int k = 0; k < nf; ++k) rhs[k] = rec.dual[frac[k]];
  rec.nodal = Vector::Zero(nf);
  if (nf > 0) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(mass);
    if (ldlt.info() == Eigen::Success) rec.nodal = ldlt.solve(rhs);
  }
  return rec;
}

State solve_initial_state(const MeshBundle& geometry, const DofMap& dofs,
                          const MaterialParams& params, const WidthProfile& width,
                          const SourceData& data) {
  const SystemMatrices reduced =
      restrict_matrices(assemble_system(geometry, params, width, 0.0), dofs);
  const LoadVectors loads =
      restrict_loads(assemble_loads(geometry, data, params, width, 0.0), dofs);
  return initial_state_from(geometry, dofs, params, reduced, loads, data);
}

TimeIntegrator::TimeIntegrator(MeshBundle geometry, DofMap dofs, MaterialParams params,
                               WidthProfile width, SourceData data, StepConfig cfg)
    : geometry_(std::move(geometry)),
      dofs_(std::move(dofs)),
      params_(params),
      width_(width),
      data_(std::move(data)),
      cfg_(cfg),
      contact_(geometry_, dofs_, params_) {
  cfg_.validate();
  params_.validate(cfg_.mode == Mode::kQ);
  const SystemMatrices full = assemble_system(geometry_, params_, width_, 0.0);
  const LoadVectors loads0 = assemble_loads(geometry_, data_, params_, width_, 0.0);
  reduced_ = apply_dirichlet(full, loads0, dofs_).matrices;
  dae_ = DaeSystem::build(reduced_, params_);
}

LoadVectors TimeIntegrator::loads(double t) const {
  return restrict_loads(assemble_loads(geometry_, data_, params_, width_, t), dofs_);
}

State TimeIntegrator::initial_state() const {
  return initial_state_from(geometry_, dofs_, params_, reduced_, loads(0.0), data_);
}

void TimeIntegrator::refresh_width(double t) {
  reduced_.W = restrict_matrix(assemble_fracture_permeability(geometry_, params_, width_, t),
                               dofs_.p_full_to_free(), dofs_.num_p(), dofs_.p_full_to_free(),
                               dofs_.num_p());
  dae_ = DaeSystem::build(reduced_, params_);
  factorized_dt_ = 0.0;
}

StepReport TimeIntegrator::step(State& state) {
  const double dt = cfg_.dt;
  const double t1 = state.t + dt;
  if (width_.time_dependent()) refresh_width(t1);
  if (factorized_dt_ != dt || !pencil_.ok()) {
    SparseMatrix a = dae_.M + dt * dae_.N;
    if (!pencil_.factorize(a)) {
      throw SolverError(SolverError::Kind::kSingular, "factorization of M + dt N failed");
    }
    factorized_dt_ = dt;
  }

  last_loads_ = loads(t1);
  const LoadVectors& f = last_loads_;
  const int nu = dae_.n_u;
  const int np = dae_.n_p;
  const Vector xi_n = dae_.pack(state);
  Vector rhs = dae_.M * xi_n;
  rhs.segment(0, nu) += dt * f.F_u;
  rhs.segment(nu, np) += dt * (f.F_p + f.F_pc);

  StepReport rep;
  rep.step = ++step_count_;
  rep.t = t1;
  Vector xi;
  if (cfg_.mode == Mode::kQ0) {
    xi = pencil_.solve(rhs);
    rep.iterations = 1;
  } else {
    const auto m_norm = [this](const Vector& v) { return std::sqrt(std::max(0.0, v.dot(dae_.M * v))); };
    Vector prev = xi_n;
    bool converged = false;
    for (int k = 1; k <= cfg_.max_fixed_point_iters; ++k) {
      const Vector u_prev = prev.segment(nu + np, nu);
      const Vector x_prev = prev.segment(0, nu);
      Vector lagged = rhs;
      lagged.segment(0, nu) -= dt * (contact_.normal_compliance_residual(u_prev) +
                                     contact_.regularized_friction_residual(u_prev, x_prev,
                                                                            cfg_.eps_friction));
      xi = pencil_.solve(lagged);
      if (!xi.allFinite()) break;
      const double change = m_norm(xi - prev);
      const double size = m_norm(xi);
      rep.iterations = k;
      rep.update_norm = size > 0.0 ? change / size : change;
      prev = xi;
      if (change <= cfg_.fixed_point_tol * size) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "fixed point did not converge at step " << rep.step << " (t = " << t1 << ") after "
          << rep.iterations << " iterations, relative update " << rep.update_norm;
      throw SolverError(SolverError::Kind::kNonConvergence, msg.str());
    }
  }
  if (!xi.allFinite()) {
    throw SolverError(SolverError::Kind::kSingular, "time step produced non-finite values");
  }
  state = dae_.unpack(xi, t1);
  if (cfg_.mode == Mode::kQ) {
    rep.friction_power =
        contact_.regularized_friction_residual(state.U, state.X, cfg_.eps_friction).dot(state.X);
  }
  return rep;
}

RunResult TimeIntegrator::run(const State& initial, int steps, const Observer& observer) {
  RunResult result;
  State s = initial;
  EnergyTracker tracker(stored_energy(s, reduced_, active_contact()));
  for (int i = 0; i < steps; ++i) {
    const State before = s;
    const StepReport rep = step(s);
    const StepBudget budget =
        step_budget(s, reduced_, last_loads_, active_contact(), cfg_.eps_friction);
    const EnergyCheck check = tracker.advance(stored_energy(s, reduced_, active_contact()), budget,
                                              cfg_.dt, rep.step, s.t);
    result.steps.push_back(rep);
    result.energy.push_back(check);
    if (observer) observer(before, s, rep, check);
  }
  result.final_state = s;
  result.report = tracker.report();
  return result;
}

}  // namespace fracporo
